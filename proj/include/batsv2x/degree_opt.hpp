#pragma once
#include <vector>

#include "batsv2x/codec.hpp"

namespace batsv2x::codec {

struct RankDistribution {
    std::vector<double> h; // h[r] for r = 0..M

    int m() const { return (int)h.size() - 1; }
    double mean() const;
    void validate() const; // nonnegative, sums to 1 within 1e-9
};

// Knobs of the degree-optimization LP. theta is maximised subject to the
// decodability constraints evaluated on a progress grid; the ripple margin
// adds finite-length slack (in packets) so the recovery wave survives
// stochastic dips, and the grid runs to 1 - end_slack/F so the tail of the
// file stays reachable without a precode.
struct DegreeOptOptions {
    double ripple_c = 2.0;     // margin = ripple_c * sqrt((1-x) F) packets
    double end_slack = 0.05;   // grid endpoint 1 - end_slack/F
    int coarse_grid = 36;      // linear grid points on [0, 0.9]
    int tail_grid = 40;        // geometric points approaching 1
    int dense_degrees = 48;    // degrees 1..dense_degrees all kept
    int geometric_degrees = 50;// log-spaced support above that, up to d_max
};

struct DegreeOptResult {
    DegreeDistribution psi;
    double theta = 0;          // guaranteed decodable-rate proxy from the LP
    double rank_mean = 0;      // mean of the driving rank distribution
    double predicted_overhead = 0; // rank_mean / theta - 1
};

// Largest degree the optimizer considers: enough mean degree for coupon-
// collector coverage of all F packets (no precode), capped at F.
int default_max_degree(int m, int f);

DegreeOptResult optimize_degree_distribution(const RankDistribution& h, int m, int f,
                                             const DegreeOptOptions& opts = {});

} // namespace batsv2x::codec
