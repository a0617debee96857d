#pragma once
#include <utility>
#include <vector>

#include "batsv2x/channel.hpp"
#include "batsv2x/rng.hpp"

namespace batsv2x::scenario {

struct GroupConfig {
    int k = 8;
    double v_mean_kmh = 55.0;
    double v_jitter_kmh = 5.0;  // per-vehicle speed resampled within +-jitter
    double gap_min_m = 15.0;    // successive gaps drawn uniformly from
    double gap_max_m = 35.0;    // [gap_min, gap_max]
    void validate() const;
};

struct Geometry {
    double rsu_lateral_m = 50.0; // RSU to the centre of the nearest lane
    double rsu_height_m = 8.0;
    double veh_height_m = 1.0;
    double lane_width_m = 3.0;
    double comm_range_m = 200.0;

    double lane_lateral(int lane) const { return rsu_lateral_m + lane * lane_width_m; }
    // length of road within range for a lane (3D: lateral offset + height gap)
    double coverage_chord(int lane) const;
    void validate() const;
};

// Positions over time. Vehicle 0 leads (rightmost); it enters coverage at
// t = 0. Speeds are piecewise constant over 1 s epochs; gaps are kept
// positive by clamping a follower that would run into its leader.
class Trajectory {
  public:
    static Trajectory build(const GroupConfig& cfg, const Geometry& geo, Rng& rng);

    int k() const { return k_; }
    const Geometry& geometry() const { return geo_; }
    int lane(int i) const { return lanes_[i]; }

    double position(int i, double t) const; // along-road coordinate, m
    double distance_to_rsu(int i, double t) const;

    // Phase-1 window: leader entry (t = 0) to last-vehicle exit.
    double window_end() const { return t_end_; }

    // d_{i,n} sampled at each packet start; entries beyond comm range are
    // flagged by the profile builder as certain loss.
    std::vector<double> packet_distances(int i, double t_packet, int n_packets) const;

    // Frozen end-of-phase-1 configuration: pairwise horizontal distance.
    double pair_distance(int i, int q) const;

  private:
    int k_ = 0;
    Geometry geo_;
    std::vector<int> lanes_;
    std::vector<double> x0_;                  // position at t = 0
    std::vector<std::vector<double>> speeds_; // per vehicle, per epoch (m/s)
    double epoch_s_ = 1.0;
    double t_end_ = 0.0;
    std::vector<double> x_end_; // frozen positions at t_end_
};

// N rounded down to a whole number of batches, and J = N/M.
std::pair<int, int> broadcast_budget(const Trajectory& traj, double t_packet, int batch_size);

// Average inter-vehicle distance used by the sharing phase (frozen geometry).
double avg_pair_distance(const Trajectory& traj, int i, int q);

// Full loss profile for the broadcast window: per-packet RSU outage (1 beyond
// range) and the pairwise V2V loss matrix from the frozen distances.
channel::LossProfile build_loss_profile(const Trajectory& traj, const channel::ChannelParams& p,
                                        double t_packet, int n_packets, int batch_size);

} // namespace batsv2x::scenario
