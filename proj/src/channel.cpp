#include "batsv2x/channel.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

namespace batsv2x::channel {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

double ChannelParams::pl0_db() const {
    double lambda = kSpeedOfLight / freq_hz;
    return 20.0 * std::log10(4.0 * M_PI * d0_m / lambda);
}

void ChannelParams::validate() const {
    if (!(beta1 > 0) || !(beta2 > 0)) throw ValidationError("path-loss exponents must be positive");
    if (!(m1 > 0.5) || !(m2_near > 0.5) || !(m2_far > 0.5))
        throw ValidationError("Nakagami shapes must exceed 0.5");
    if (!(omega > 0)) throw ValidationError("omega must be positive");
    if (!(dc_m > d0_m)) throw ValidationError("dc must exceed d0");
    if (!std::isfinite(pt_dbm) || !std::isfinite(pt_v2v_dbm) || !std::isfinite(pn_dbm))
        throw ValidationError("powers must be finite");
}

double path_loss_db(double d_m, const ChannelParams& p) {
    if (!(d_m > p.d0_m)) throw DistanceTooSmall("distance must exceed the path-loss reference");
    double pl0 = p.pl0_db();
    if (d_m <= p.dc_m) return pl0 + 10.0 * p.beta1 * std::log10(d_m / p.d0_m);
    return pl0 + 10.0 * p.beta1 * std::log10(p.dc_m / p.d0_m) +
           10.0 * p.beta2 * std::log10(d_m / p.dc_m);
}

double path_gain(double d_m, const ChannelParams& p) {
    return std::pow(10.0, -path_loss_db(d_m, p) / 10.0);
}

double snr_outage_prob(double d_m, double pt_dbm, double m_shape, const ChannelParams& p) {
    // outage threshold on the fading gain: g < A with
    // A = gamma_th * PN / (Pt * path_gain(d))
    double a_db = p.gamma_th_db + p.pn_dbm - pt_dbm + path_loss_db(d_m, p);
    double a = std::pow(10.0, a_db / 10.0);
    // gain ~ Gamma(m, omega/m): P(g < A) = 1 - Q(m, m*A/omega)
    return 1.0 - boost::math::gamma_q(m_shape, m_shape * a / p.omega);
}

double v2v_loss_prob(double s_bar_m, const ChannelParams& p) {
    double m2 = s_bar_m < p.v2v_m2_switch_m ? p.m2_near : p.m2_far;
    return snr_outage_prob(s_bar_m, p.pt_v2v_dbm, m2, p);
}

double batch_loss_prob(int batch, int vehicle, const LossProfile& profile) {
    int m = profile.batch_size;
    int first = batch * m;
    if (batch < 0 || vehicle < 0 || vehicle >= profile.k || first + m > profile.n_packets)
        throw IndexOutOfRange("batch or vehicle index outside the profile");
    double s = 0;
    for (int n = first; n < first + m; ++n) s += profile.loss(vehicle, n);
    return s / m;
}

double group_loss_prob(int batch, const LossProfile& profile, int k) {
    int m = profile.batch_size;
    int first = batch * m;
    if (batch < 0 || k < 1 || k > profile.k || first + m > profile.n_packets)
        throw IndexOutOfRange("batch index outside the profile");
    double s = 0;
    for (int n = first; n < first + m; ++n) {
        double prod = 1.0;
        for (int i = 0; i < k; ++i) prod *= profile.loss(i, n);
        s += prod;
    }
    return s / m;
}

} // namespace batsv2x::channel
