#pragma once
#include <vector>

#include "batsv2x/channel.hpp"
#include "batsv2x/degree_opt.hpp"

namespace batsv2x::analysis {

struct LpInstance {
    int k = 0;
    long f = 0;
    std::vector<double> y_sums;  // per-vehicle phase-1 reception totals
    std::vector<double> p_hat;   // k x k V2V loss, diagonal unused

    double v2v(int from, int to) const { return p_hat[(size_t)from * k + to]; }
};

struct LpSolution {
    std::vector<double> x; // per-vehicle transmission counts
    double objective = 0;
    bool feasible = false;
};

// Minimum total V2V transmissions: minimize sum X_i subject to
// sum_{q != i} (1 - p_hat(q,i)) X_q >= F - Y_i and 0 <= X_i <= Y_i.
LpSolution lp_lower_bound(const LpInstance& inst);

// Expected count of packets of batch j held by vehicle i but missed by q.
double innovative_set_size(int i, int j, int q, const channel::LossProfile& profile);

// Per-vehicle batch selection probabilities (normalized utility weights).
// A vehicle that can offer nothing gets the uniform fallback and a flag.
struct SelectionProbs {
    std::vector<double> rho; // k x J row-major
    std::vector<bool> degenerate;
    double operator()(int i, int j, int j_count) const { return rho[(size_t)i * j_count + j]; }
};
SelectionProbs batch_selection_prob(const channel::LossProfile& profile, int k);

// Identifier mapping that skips the bottleneck: s if s < b else s + 1
// (1-based, as used by the estimator internals).
int map_w(int s, int b, int k);

// Expected number of packets of batch j inside every one of the selected
// peers' innovative sets toward the bottleneck.
double intersection_size(const std::vector<int>& peers, int j, int b,
                         const channel::LossProfile& profile);

// Inclusion-exclusion innovative content of batch j toward bottleneck b,
// with each intersection term weighted by the smallest selection
// probability involved. `exact_enum` forces the explicit subset sum (test
// oracle); the default uses the equivalent sorted-threshold evaluation.
double innovative_content(int j, int b, const channel::LossProfile& profile,
                          const SelectionProbs& rho, bool exact_enum = false);

struct RankEstimate {
    int bottleneck = 0;
    long cutoff = 0;
    std::vector<double> p_e;       // per-batch success probability
    std::vector<double> cdf;       // F_e over ranks 0..M
    std::vector<double> pmf;       // f_e by differencing
    int clamped_batches = 0;       // p_e hit the cap
    codec::RankDistribution rank_distribution() const { return {pmf}; }
};

// Cutoff c = ceil(delta / sum I(j)) and the per-batch binomial mixture CDF.
RankEstimate cutoff_and_ranks(int b, const channel::LossProfile& profile, double delta_packets);

// argmin over vehicles of expected phase-1 receptions, ties to lower index.
int pick_bottleneck(const channel::LossProfile& profile);

// Convenience: full estimator pipeline for a profile and file size.
RankEstimate estimate_bottleneck_ranks(const channel::LossProfile& profile, long f);

} // namespace batsv2x::analysis
