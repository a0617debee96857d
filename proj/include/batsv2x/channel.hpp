#pragma once
#include <cstdint>
#include <vector>

#include "batsv2x/errors.hpp"
#include "batsv2x/rng.hpp"

namespace batsv2x::channel {

// Radio constants. Defaults are the simulation settings used throughout:
// 20 dBm transmitters, -89 dBm noise, 10 dB SNR threshold, 5.9 GHz carrier,
// dual-slope path loss (2.3 / 2.7, break at 80 m) anchored at the 10 m
// free-space reference, Nakagami shapes 1.2 (I2V) and 1.2 / 0.75 (V2V, with
// the switch at 90 m), unit mean channel power.
struct ChannelParams {
    double pt_dbm = 20.0;       // RSU transmit power
    double pt_v2v_dbm = 20.0;   // vehicle transmit power
    double pn_dbm = -89.0;      // noise power
    double gamma_th_db = 10.0;  // SNR threshold
    double freq_hz = 5.9e9;     // carrier
    double d0_m = 10.0;         // path-loss reference distance
    double dc_m = 80.0;         // dual-slope critical distance
    double beta1 = 2.3;
    double beta2 = 2.7;
    double m1 = 1.2;            // I2V Nakagami shape
    double m2_near = 1.2;       // V2V shape below the switch distance
    double m2_far = 0.75;       // V2V shape beyond it
    double v2v_m2_switch_m = 90.0;
    double omega = 1.0;         // mean channel power

    double pl0_db() const; // free-space loss at d0 for freq_hz
    void validate() const;
};

// Piecewise log-distance path loss in dB; continuous at dc. d must exceed d0.
double path_loss_db(double d_m, const ChannelParams& p);

// Linear power gain 10^(-PL/10).
double path_gain(double d_m, const ChannelParams& p);

// P(SNR < gamma_th) for a Nakagami channel with shape m, transmit power
// pt_dbm and the path loss at distance d.
double snr_outage_prob(double d_m, double pt_dbm, double m_shape, const ChannelParams& p);

// V2V packet loss for a pair at average distance s_bar; the shape factor
// follows the 90 m rule. Distances beyond vehicle range count as lost.
double v2v_loss_prob(double s_bar_m, const ChannelParams& p);

// Per-vehicle, per-packet RSU loss probabilities plus pairwise V2V losses.
struct LossProfile {
    int k = 0;
    int n_packets = 0;
    int batch_size = 0;
    std::vector<double> p_in;  // k x n_packets, row-major
    std::vector<double> p_hat; // k x k, diagonal unused

    double loss(int vehicle, int packet) const { return p_in[(size_t)vehicle * n_packets + packet]; }
    double& loss(int vehicle, int packet) { return p_in[(size_t)vehicle * n_packets + packet]; }
    double v2v(int from, int to) const { return p_hat[(size_t)from * k + to]; }
    double& v2v(int from, int to) { return p_hat[(size_t)from * k + to]; }
    int batches() const { return n_packets / batch_size; }
};

// Mean of P_{i,n} over the packets of one batch.
double batch_loss_prob(int batch, int vehicle, const LossProfile& profile);

// Mean over the batch of the all-vehicles product: probability a packet is
// received by nobody in the group.
double group_loss_prob(int batch, const LossProfile& profile, int k);

inline bool sample_reception(double loss_p, Rng& rng) { return !rng.bernoulli(loss_p); }

} // namespace batsv2x::channel
