#include "batsv2x/trial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace batsv2x::harness {

namespace {

enum StreamId : uint64_t {
    kScenario = 1,
    kEncode = 2,
    kReception = 3,
    kUtility = 4,
    kSharing = 5,
    kSource = 6,
    kLeavers = 7,
};

channel::LossProfile reduce_profile(const channel::LossProfile& full,
                                    const std::vector<int>& keep) {
    channel::LossProfile out;
    out.k = (int)keep.size();
    out.n_packets = full.n_packets;
    out.batch_size = full.batch_size;
    out.p_in.resize((size_t)out.k * out.n_packets);
    out.p_hat.assign((size_t)out.k * out.k, 0.0);
    for (int a = 0; a < out.k; ++a) {
        for (int n = 0; n < out.n_packets; ++n) out.loss(a, n) = full.loss(keep[a], n);
        for (int b = 0; b < out.k; ++b)
            if (a != b) out.v2v(a, b) = full.v2v(keep[a], keep[b]);
    }
    return out;
}

phase1::ReceptionLedger reduce_ledger(const phase1::ReceptionLedger& full,
                                      const std::vector<int>& keep) {
    phase1::ReceptionLedger out;
    out.k = (int)keep.size();
    out.batches = full.batches;
    out.batch_size = full.batch_size;
    out.masks.resize((size_t)out.k * out.batches);
    for (int a = 0; a < out.k; ++a)
        for (int j = 0; j < out.batches; ++j)
            out.masks[(size_t)a * out.batches + j] = full.mask(keep[a], j);
    return out;
}

} // namespace

CodeDesign design_code(const SimConfig& cfg) {
    SimConfig det = cfg;
    det.group.v_jitter_kmh = 0;
    double gap = 0.5 * (cfg.group.gap_min_m + cfg.group.gap_max_m);
    det.group.gap_min_m = gap;
    det.group.gap_max_m = gap;
    Rng rng(0); // deterministic trajectory draws nothing randomized
    auto traj = scenario::Trajectory::build(det.group, det.geo, rng);
    auto [n, j] = scenario::broadcast_budget(traj, det.t_packet_s(), det.m);
    CodeDesign design;
    design.n_packets = n;
    design.batches = j;
    if (j == 0) throw ValidationError("broadcast window admits no batches");
    auto profile = scenario::build_loss_profile(traj, det.chan, det.t_packet_s(), n, det.m);
    design.bottleneck = analysis::pick_bottleneck(profile);
    design.estimate = analysis::estimate_bottleneck_ranks(profile, cfg.f);
    design.opt = codec::optimize_degree_distribution(design.estimate.rank_distribution(), cfg.m,
                                                     (int)cfg.f);
    design.psi = design.opt.psi;
    return design;
}

TrialResult run_trial(const SimConfig& cfg, uint64_t trial, const TrialOptions& opts) {
    cfg.validate();
    TrialResult res;
    res.trial = trial;
    res.k = cfg.group.k;
    res.f = cfg.f;

    Rng scen_rng = Rng::substream(cfg.seed, {kScenario, trial});
    auto traj = scenario::Trajectory::build(cfg.group, cfg.geo, scen_rng);
    res.phase1_duration_s = traj.window_end();
    auto [n, j_count] = scenario::broadcast_budget(traj, cfg.t_packet_s(), cfg.m);
    res.n_packets = n;
    res.batches = j_count;
    if (j_count == 0) return res;

    auto profile = scenario::build_loss_profile(traj, cfg.chan, cfg.t_packet_s(), n, cfg.m);

    // analytic reception expectations for this trial's realized trajectory
    res.k_i_expected.resize(cfg.group.k);
    res.k_i_var.resize(cfg.group.k);
    for (int i = 0; i < cfg.group.k; ++i) {
        double e = 0, v = 0;
        for (int p = 0; p < n; ++p) {
            double q = 1.0 - profile.loss(i, p);
            e += q;
            v += q * (1.0 - q);
        }
        res.k_i_expected[i] = e;
        res.k_i_var[i] = v;
    }
    for (int p = 0; p < n; ++p) {
        double lose_all = 1.0;
        for (int i = 0; i < cfg.group.k; ++i) lose_all *= profile.loss(i, p);
        res.k_g_expected += 1.0 - lose_all;
        res.k_g_var += lose_all * (1.0 - lose_all);
    }

    // encode + broadcast
    std::optional<codec::BatchStore> store;
    std::vector<codec::DecoderState> decoders;
    codec::SourceFile file;
    if (opts.with_payload) {
        if (!opts.psi) throw ValidationError("payload trials need a degree distribution");
        Rng src_rng = Rng::substream(cfg.seed, {kSource, trial});
        file = codec::SourceFile::random((int)cfg.f, cfg.ell, src_rng);
        store.emplace((int)cfg.f, cfg.m, cfg.ell);
        Rng enc_rng = Rng::substream(cfg.seed, {kEncode, trial});
        for (int j = 0; j < j_count; ++j)
            store->add(codec::encode_batch(file, (uint32_t)j, *opts.psi, cfg.m, enc_rng));
        decoders.reserve(cfg.group.k);
        for (int i = 0; i < cfg.group.k; ++i) decoders.emplace_back(&*store);
    }

    Rng rx_rng = Rng::substream(cfg.seed, {kReception, trial});
    auto ledger = phase1::run_broadcast_traced(profile, j_count, cfg.m,
                                               opts.with_payload ? &decoders : nullptr, rx_rng,
                                               opts.phase1_trace);

    res.y_totals.resize(cfg.group.k);
    for (int i = 0; i < cfg.group.k; ++i) res.y_totals[i] = ledger.total(i);
    for (int j = 0; j < j_count; ++j) {
        uint32_t u = 0;
        for (int i = 0; i < cfg.group.k; ++i) u |= ledger.mask(i, j);
        res.group_innovative += __builtin_popcount(u);
    }

    // departures happen after phase 1, before any sharing
    std::vector<int> keep(cfg.group.k);
    for (int i = 0; i < cfg.group.k; ++i) keep[i] = i;
    if (opts.leave_fraction > 0) {
        if (opts.leave_fraction >= 1.0) throw AllVehiclesLeft("leave fraction must stay below 1");
        int nleave = (int)std::ceil(opts.leave_fraction * cfg.group.k);
        if (nleave >= cfg.group.k) throw AllVehiclesLeft("no vehicles left for sharing");
        Rng lrng = Rng::substream(cfg.seed, {kLeavers, trial});
        auto gone = lrng.sample_without_replacement((uint32_t)cfg.group.k, (uint32_t)nleave);
        res.leavers.assign(gone.begin(), gone.end());
        std::sort(res.leavers.begin(), res.leavers.end());
        keep.clear();
        for (int i = 0; i < cfg.group.k; ++i)
            if (!std::binary_search(res.leavers.begin(), res.leavers.end(), i)) keep.push_back(i);
        profile = reduce_profile(profile, keep);
        ledger = reduce_ledger(ledger, keep);
        if (opts.with_payload) {
            std::vector<codec::DecoderState> kept;
            kept.reserve(keep.size());
            for (int i : keep) kept.push_back(std::move(decoders[i]));
            decoders = std::move(kept);
        }
    }
    const int k = (int)keep.size();

    res.bottleneck = analysis::pick_bottleneck(profile);

    // transmission lower bound from the realized reception totals
    {
        analysis::LpInstance inst;
        inst.k = k;
        inst.f = cfg.f;
        for (int a = 0; a < k; ++a) inst.y_sums.push_back((double)ledger.total(a));
        inst.p_hat = profile.p_hat;
        try {
            auto sol = analysis::lp_lower_bound(inst);
            res.lp_objective = sol.objective;
            res.lp_feasible = sol.feasible;
        } catch (const Infeasible&) {
            res.lp_feasible = false;
            res.lp_objective = std::numeric_limits<double>::quiet_NaN();
        }
    }

    if (!opts.with_payload || !opts.run_phase2) return res;

    std::vector<phase2::TransmissionSchedule> schedules(k);
    for (int i = 0; i < k; ++i) {
        Rng urng = Rng::substream(cfg.seed, {kUtility, trial, (uint64_t)i});
        schedules[i] = phase2::build_schedule(i, ledger, profile, urng);
    }

    phase2::SharingOptions sopts;
    sopts.timing.dt_max_s = cfg.dt_max_us * 1e-6;
    sopts.timing.t_packet_s = cfg.t_packet_v2v_s();
    sopts.bottleneck = res.bottleneck;
    sopts.rank_snapshot_target = cfg.f;
    sopts.seed = Rng::substream(cfg.seed, {kSharing, trial}).next_u64();

    if (decoders[res.bottleneck].total_rank() >= cfg.f)
        res.bottleneck_ranks = decoders[res.bottleneck].rank_profile();

    auto stats = phase2::run_sharing(decoders, schedules, profile, sopts, opts.phase2_trace);
    res.v2v_slots = stats.slots;
    res.v2v_transmissions = stats.transmissions;
    res.phase2_delay_s = stats.delay_s(sopts.timing);
    res.completion_slot = stats.completion_slot;
    res.exhausted = stats.schedule_exhausted;
    res.stalled = stats.stalled;
    if (res.bottleneck_ranks.empty() && !stats.bottleneck_ranks.empty())
        res.bottleneck_ranks = stats.bottleneck_ranks;

    res.overhead.assign(k, std::numeric_limits<double>::quiet_NaN());
    res.all_completed = true;
    for (int i = 0; i < k; ++i) {
        if (decoders[i].decode_complete())
            res.overhead[i] = ((double)decoders[i].total_rank() - cfg.f) / cfg.f;
        else
            res.all_completed = false;
    }

    if (opts.verify_decode) {
        for (int i = 0; i < k && res.byte_exact; ++i) {
            if (!decoders[i].decode_complete()) continue;
            auto bytes = decoders[i].decode_file();
            res.byte_exact = bytes == file.data;
        }
    }
    return res;
}

TrialResult dynamics_experiment(const SimConfig& cfg, double leave_fraction, uint64_t trial,
                                const TrialOptions& base_opts) {
    TrialOptions opts = base_opts;
    opts.leave_fraction = leave_fraction;
    return run_trial(cfg, trial, opts);
}

} // namespace batsv2x::harness
