#pragma once
#include <optional>
#include <string>
#include <vector>

#include "batsv2x/analysis.hpp"
#include "batsv2x/config.hpp"
#include "batsv2x/degree_opt.hpp"
#include "batsv2x/phase1.hpp"
#include "batsv2x/phase2.hpp"

namespace batsv2x::harness {

// Degree design for a configuration: rank estimator on the deterministic
// (jitter-free, mean-gap) trajectory at v_mean, then the optimization LP.
// Computed once per configuration and shared across trials.
struct CodeDesign {
    codec::DegreeDistribution psi;
    analysis::RankEstimate estimate;
    codec::DegreeOptResult opt;
    int n_packets = 0;
    int batches = 0;
    int bottleneck = 0;
};
CodeDesign design_code(const SimConfig& cfg);

struct TrialOptions {
    bool with_payload = true; // encode file bytes; enables byte verification
    bool run_phase2 = true;
    bool verify_decode = true;
    const codec::DegreeDistribution* psi = nullptr; // required for payload runs
    double leave_fraction = 0.0; // vehicles leaving after phase 1
    phase1::TraceSink phase1_trace;
    phase2::SlotTrace phase2_trace;
};

struct TrialResult {
    uint64_t trial = 0;
    int k = 0;
    long f = 0;
    int n_packets = 0;
    int batches = 0;
    double phase1_duration_s = 0;

    std::vector<long> y_totals;      // empirical phase-1 receptions per vehicle
    std::vector<double> k_i_expected;
    std::vector<double> k_i_var;
    long group_innovative = 0;       // packets received by at least one vehicle
    double k_g_expected = 0;
    double k_g_var = 0;

    int bottleneck = 0;
    double lp_objective = 0;
    bool lp_feasible = false;

    long v2v_slots = 0;
    long v2v_transmissions = 0;
    double phase2_delay_s = 0;
    std::vector<long> completion_slot;
    std::vector<double> overhead;    // per vehicle, NaN while incomplete
    bool all_completed = false;
    bool exhausted = false;
    bool stalled = false;
    bool byte_exact = true;          // completed vehicles reproduced the file

    std::vector<int> bottleneck_ranks; // rank profile when total rank hits F
    std::vector<int> leavers;          // vehicles removed before phase 2
};

TrialResult run_trial(const SimConfig& cfg, uint64_t trial, const TrialOptions& opts);

// Post-phase-1 departures: ceil(fraction * k) uniformly chosen vehicles leave;
// the rest re-derive pair distances and schedules.
TrialResult dynamics_experiment(const SimConfig& cfg, double leave_fraction, uint64_t trial,
                                const TrialOptions& opts);

} // namespace batsv2x::harness
