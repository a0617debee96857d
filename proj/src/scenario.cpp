#include "batsv2x/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "batsv2x/errors.hpp"

namespace batsv2x::scenario {

void GroupConfig::validate() const {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (!(v_mean_kmh > v_jitter_kmh) || v_jitter_kmh < 0)
        throw ValidationError("require v_mean > v_jitter >= 0");
    if (!(gap_min_m > 0) || gap_max_m < gap_min_m)
        throw ValidationError("gap bounds must satisfy 0 < min <= max");
}

void Geometry::validate() const {
    double dh = rsu_height_m - veh_height_m;
    double lat = lane_lateral(1);
    if (comm_range_m * comm_range_m <= lat * lat + dh * dh)
        throw ValidationError("communication range too small for the lane geometry");
}

double Geometry::coverage_chord(int lane) const {
    double lat = lane_lateral(lane);
    double dh = rsu_height_m - veh_height_m;
    double s = comm_range_m * comm_range_m - lat * lat - dh * dh;
    return 2.0 * std::sqrt(s);
}

namespace {
constexpr double kMinGap = 2.0; // m, hard floor when jitter squeezes a pair
}

Trajectory Trajectory::build(const GroupConfig& cfg, const Geometry& geo, Rng& rng) {
    cfg.validate();
    geo.validate();
    Trajectory t;
    t.k_ = cfg.k;
    t.geo_ = geo;
    t.lanes_.resize(cfg.k);
    for (int i = 0; i < cfg.k; ++i) t.lanes_[i] = i % 2;

    // leader enters its chord at t = 0
    t.x0_.resize(cfg.k);
    t.x0_[0] = -geo.coverage_chord(t.lanes_[0]) / 2.0;
    for (int i = 1; i < cfg.k; ++i)
        t.x0_[i] = t.x0_[i - 1] - rng.uniform(cfg.gap_min_m, cfg.gap_max_m);

    double v_mean = cfg.v_mean_kmh / 3.6;
    double jit = cfg.v_jitter_kmh / 3.6;
    double exit_x = geo.coverage_chord(t.lanes_[cfg.k - 1]) / 2.0;

    // worst-case horizon: slowest admissible speed over the whole span, with
    // slack for clamped followers
    double horizon = (exit_x - t.x0_[cfg.k - 1]) / std::max(1e-9, v_mean - jit) + 8.0;
    int epochs = (int)std::ceil(horizon / t.epoch_s_) + 1;

    t.speeds_.assign(cfg.k, std::vector<double>(epochs));
    std::vector<double> x = t.x0_;
    t.t_end_ = 0;
    for (int e = 0; e < epochs; ++e) {
        for (int i = 0; i < cfg.k; ++i) {
            double v = jit > 0 ? rng.uniform(v_mean - jit, v_mean + jit) : v_mean;
            if (i > 0) {
                // keep ordering: redraw a follower that would close the gap
                // below the floor within this epoch, then clamp
                double gap_end = (x[i - 1] + t.speeds_[i - 1][e] * t.epoch_s_) - (x[i] + v * t.epoch_s_);
                int tries = 0;
                while (gap_end < kMinGap && tries++ < 8 && jit > 0) {
                    v = rng.uniform(v_mean - jit, v_mean + jit);
                    gap_end = (x[i - 1] + t.speeds_[i - 1][e] * t.epoch_s_) - (x[i] + v * t.epoch_s_);
                }
                if (gap_end < kMinGap)
                    v = std::max(0.0, t.speeds_[i - 1][e] - (kMinGap - (x[i - 1] - x[i])) / t.epoch_s_);
            }
            t.speeds_[i][e] = v;
        }
        for (int i = 0; i < cfg.k; ++i) x[i] += t.speeds_[i][e] * t.epoch_s_;
    }

    // locate last-vehicle exit within its epoch
    double tt = 0;
    double xi = t.x0_[cfg.k - 1];
    for (int e = 0; e < epochs; ++e) {
        double v = t.speeds_[cfg.k - 1][e];
        double xn = xi + v * t.epoch_s_;
        if (xn >= exit_x && v > 0) {
            t.t_end_ = tt + (exit_x - xi) / v;
            break;
        }
        xi = xn;
        tt += t.epoch_s_;
        t.t_end_ = tt;
    }

    t.x_end_.resize(cfg.k);
    for (int i = 0; i < cfg.k; ++i) t.x_end_[i] = t.position(i, t.t_end_);
    return t;
}

double Trajectory::position(int i, double t) const {
    if (t <= 0) return x0_[i] + speeds_[i][0] * t;
    double x = x0_[i];
    int e = 0;
    double remaining = t;
    int last = (int)speeds_[i].size() - 1;
    while (remaining > epoch_s_ && e < last) {
        x += speeds_[i][e] * epoch_s_;
        remaining -= epoch_s_;
        ++e;
    }
    return x + speeds_[i][e] * remaining;
}

double Trajectory::distance_to_rsu(int i, double t) const {
    double x = position(i, t);
    double lat = geo_.lane_lateral(lanes_[i]);
    double dh = geo_.rsu_height_m - geo_.veh_height_m;
    return std::sqrt(x * x + lat * lat + dh * dh);
}

std::vector<double> Trajectory::packet_distances(int i, double t_packet, int n_packets) const {
    std::vector<double> d((size_t)n_packets);
    for (int n = 0; n < n_packets; ++n) d[n] = distance_to_rsu(i, n * t_packet);
    return d;
}

double Trajectory::pair_distance(int i, int q) const {
    double dx = x_end_[i] - x_end_[q];
    double dl = (lanes_[i] - lanes_[q]) * geo_.lane_width_m;
    return std::sqrt(dx * dx + dl * dl);
}

std::pair<int, int> broadcast_budget(const Trajectory& traj, double t_packet, int batch_size) {
    int n = (int)std::floor(traj.window_end() / t_packet);
    n -= n % batch_size;
    if (n < 0) n = 0;
    return {n, n / batch_size};
}

double avg_pair_distance(const Trajectory& traj, int i, int q) {
    if (i == q) throw IndexOutOfRange("pair distance needs two distinct vehicles");
    return traj.pair_distance(i, q);
}

channel::LossProfile build_loss_profile(const Trajectory& traj, const channel::ChannelParams& p,
                                        double t_packet, int n_packets, int batch_size) {
    channel::LossProfile prof;
    prof.k = traj.k();
    prof.n_packets = n_packets;
    prof.batch_size = batch_size;
    prof.p_in.resize((size_t)prof.k * n_packets, 1.0);
    prof.p_hat.assign((size_t)prof.k * prof.k, 0.0);
    for (int i = 0; i < prof.k; ++i) {
        auto d = traj.packet_distances(i, t_packet, n_packets);
        for (int n = 0; n < n_packets; ++n) {
            if (d[n] > traj.geometry().comm_range_m || d[n] <= p.d0_m)
                prof.loss(i, n) = 1.0;
            else
                prof.loss(i, n) = channel::snr_outage_prob(d[n], p.pt_dbm, p.m1, p);
        }
    }
    for (int i = 0; i < prof.k; ++i)
        for (int q = 0; q < prof.k; ++q) {
            if (i == q) continue;
            double s = traj.pair_distance(i, q);
            prof.v2v(i, q) = s > traj.geometry().comm_range_m ? 1.0 : channel::v2v_loss_prob(s, p);
        }
    return prof;
}

} // namespace batsv2x::scenario
