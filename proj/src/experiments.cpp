#include "batsv2x/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "batsv2x/csv.hpp"
#include "batsv2x/parallel.hpp"

namespace batsv2x::harness {

std::vector<TrialResult> run_many(const SimConfig& cfg, int n, const TrialOptions& opts,
                                  int workers) {
    std::vector<TrialResult> out(n);
    parallel_for(n, [&](int i) { out[i] = run_trial(cfg, (uint64_t)i + 1, opts); }, workers);
    return out;
}

const std::vector<std::string>& speed_csv_header() {
    static const std::vector<std::string> h = {
        "speed_kmh", "trial",      "duration_s",     "min_y_total",  "max_y_total",
        "group_innovative", "min_k_expected", "k_g_expected", "file_packets"};
    return h;
}
const std::vector<std::string>& groupsize_csv_header() {
    static const std::vector<std::string> h = {"k",     "trial", "mean_y_total", "min_y_total",
                                               "group_innovative", "gain_group_over_mean"};
    return h;
}
const std::vector<std::string>& rankcdf_csv_header() {
    static const std::vector<std::string> h = {"speed_kmh", "rank",        "estimated_pmf",
                                               "estimated_cdf", "empirical_pmf", "empirical_cdf",
                                               "trials_used"};
    return h;
}
const std::vector<std::string>& delay_csv_header() {
    static const std::vector<std::string> h = {
        "k",       "scheme",       "trial",     "slots",  "transmissions",
        "delay_s", "lp_bound_tx",  "lp_delay_s", "completed", "stalled"};
    return h;
}
const std::vector<std::string>& rate_csv_header() {
    static const std::vector<std::string> h = {"t_s", "vehicle", "phase", "rate_pkts_per_s"};
    return h;
}
const std::vector<std::string>& dynamics_csv_header() {
    static const std::vector<std::string> h = {"leave_fraction", "trial", "transmissions",
                                               "slots",          "delay_s", "completed"};
    return h;
}
const std::vector<std::string>& single_csv_header() {
    static const std::vector<std::string> h = {
        "trial",   "vehicle", "y_total", "k_expected",      "overhead", "completion_slot",
        "lp_bound", "transmissions", "phase2_delay_s", "byte_exact"};
    return h;
}

namespace {

std::string join(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

std::vector<std::string> exp_speed(const SimConfig& cfg, const std::string& out) {
    std::string path = join(out, "speed.csv");
    CsvWriter w(path, speed_csv_header());
    TrialOptions opts;
    opts.with_payload = false;
    opts.run_phase2 = false;
    for (double v : {40.0, 44.0, 48.0, 50.0, 52.0, 55.0, 60.0, 65.0}) {
        SimConfig c = cfg;
        c.group.v_mean_kmh = v;
        auto rs = run_many(c, cfg.trials, opts);
        for (const auto& r : rs) {
            long miny = *std::min_element(r.y_totals.begin(), r.y_totals.end());
            long maxy = *std::max_element(r.y_totals.begin(), r.y_totals.end());
            double minek = *std::min_element(r.k_i_expected.begin(), r.k_i_expected.end());
            w.field(v).field((long)r.trial).field(r.phase1_duration_s).field(miny).field(maxy)
                .field(r.group_innovative).field(minek).field(r.k_g_expected).field((long)cfg.f);
            w.end_row();
        }
    }
    return {path};
}

std::vector<std::string> exp_groupsize(const SimConfig& cfg, const std::string& out) {
    std::string path = join(out, "groupsize_gain.csv");
    CsvWriter w(path, groupsize_csv_header());
    TrialOptions opts;
    opts.with_payload = false;
    opts.run_phase2 = false;
    for (int k : {1, 2, 4, 8, 16, 24}) {
        SimConfig c = cfg;
        c.group.k = k;
        auto rs = run_many(c, cfg.trials, opts);
        for (const auto& r : rs) {
            double mean = 0;
            long miny = r.y_totals[0];
            for (long y : r.y_totals) {
                mean += (double)y;
                miny = std::min(miny, y);
            }
            mean /= r.y_totals.size();
            w.field(k).field((long)r.trial).field(mean).field(miny).field(r.group_innovative)
                .field(mean > 0 ? r.group_innovative / mean : 0.0);
            w.end_row();
        }
    }
    return {path};
}

std::vector<std::string> exp_rankcdf(const SimConfig& cfg, const std::string& out) {
    std::string path = join(out, "rankcdf.csv");
    CsvWriter w(path, rankcdf_csv_header());
    for (double v : {55.0, 60.0}) {
        SimConfig c = cfg;
        c.group.v_mean_kmh = v;
        auto design = design_code(c);
        TrialOptions opts;
        opts.psi = &design.psi;
        auto rs = run_many(c, cfg.trials, opts);
        std::vector<long> hist(c.m + 1, 0);
        long used = 0;
        for (const auto& r : rs) {
            if (r.bottleneck_ranks.empty()) continue;
            ++used;
            for (int rank : r.bottleneck_ranks) hist[std::min(rank, c.m)]++;
        }
        double total = 0;
        for (long h : hist) total += (double)h;
        double cum_e = 0, cum_s = 0;
        for (int rank = 0; rank <= c.m; ++rank) {
            double pmf = total > 0 ? hist[rank] / total : 0.0;
            cum_e += pmf;
            cum_s += design.estimate.pmf[rank];
            w.field(v).field(rank).field(design.estimate.pmf[rank]).field(cum_s).field(pmf)
                .field(cum_e).field(used);
            w.end_row();
        }
    }
    return {path};
}

std::vector<std::string> exp_delay(const SimConfig& cfg, const std::string& out) {
    std::string path = join(out, "delay.csv");
    CsvWriter w(path, delay_csv_header());
    for (int k : {4, 8, 16, 24}) {
        SimConfig c = cfg;
        c.group.k = k;
        auto design = design_code(c);
        TrialOptions opts;
        opts.psi = &design.psi;
        auto rs = run_many(c, cfg.trials, opts);
        for (const auto& r : rs) {
            w.field(k).field(std::string("batch")).field((long)r.trial).field(r.v2v_slots)
                .field(r.v2v_transmissions).field(r.phase2_delay_s).field(r.lp_objective)
                .field(r.lp_objective * c.slot_s()).field((int)r.all_completed)
                .field((int)r.stalled);
            w.end_row();
        }
        std::vector<BaselineResult> bs(cfg.trials);
        parallel_for(cfg.trials, [&](int i) { bs[i] = baseline_block_rlnc(c, (uint64_t)i + 1); });
        for (const auto& b : bs) {
            w.field(k).field(std::string("block_rlnc")).field((long)b.trial).field(b.v2v_slots)
                .field(b.v2v_transmissions).field(b.phase2_delay_s).field(0.0).field(0.0)
                .field((int)b.all_completed).field((int)b.stalled);
            w.end_row();
        }
    }
    return {path};
}

std::vector<std::string> exp_rate(const SimConfig& cfg, const std::string& out) {
    std::string path = join(out, "rate.csv");
    // windowed innovative-acceptance counts on a common clock
    std::map<std::pair<int, long>, long> phase1_bins, phase2_bins;
    double t_p = cfg.t_packet_s();
    SimConfig c = cfg;
    auto design = design_code(c);
    TrialOptions opts;
    opts.psi = &design.psi;
    double t_end = 0;
    opts.phase1_trace = [&](int n, int, int i, bool got) {
        if (!got) return;
        long bin = (long)(n * t_p);
        ++phase1_bins[{i, bin}];
    };
    double slot_s = c.slot_s();
    opts.phase2_trace = [&](long slot, int, uint32_t, const std::vector<int>& acc) {
        for (int i = 0; i < (int)acc.size(); ++i) {
            if (!acc[i]) continue;
            long bin = (long)(t_end + slot * slot_s);
            ++phase2_bins[{i, bin}];
        }
    };
    // trace callbacks force a single-threaded run
    SimConfig c1 = c;
    auto design_end = design_code(c1);
    (void)design_end;
    auto r = run_trial(c, 1, opts);
    t_end = r.phase1_duration_s;
    // re-run with the correct phase offset now known
    phase1_bins.clear();
    phase2_bins.clear();
    r = run_trial(c, 1, opts);
    CsvWriter w(path, rate_csv_header());
    for (const auto& [key, count] : phase1_bins) {
        w.field((double)key.second).field(key.first).field(std::string("broadcast"))
            .field((double)count);
        w.end_row();
    }
    for (const auto& [key, count] : phase2_bins) {
        w.field((double)key.second).field(key.first).field(std::string("sharing"))
            .field((double)count);
        w.end_row();
    }
    return {path};
}

std::vector<std::string> exp_dynamics(const SimConfig& cfg, const std::string& out) {
    std::string path = join(out, "dynamics.csv");
    CsvWriter w(path, dynamics_csv_header());
    auto design = design_code(cfg);
    for (double frac : {0.0, 0.25}) {
        TrialOptions opts;
        opts.psi = &design.psi;
        opts.leave_fraction = frac;
        auto rs = run_many(cfg, cfg.trials, opts);
        for (const auto& r : rs) {
            w.field(frac).field((long)r.trial).field(r.v2v_transmissions).field(r.v2v_slots)
                .field(r.phase2_delay_s).field((int)r.all_completed);
            w.end_row();
        }
    }
    return {path};
}

std::vector<std::string> exp_single(const SimConfig& cfg, const std::string& out) {
    std::string path = join(out, "trial.csv");
    CsvWriter w(path, single_csv_header());
    auto design = design_code(cfg);
    TrialOptions opts;
    opts.psi = &design.psi;
    for (int t = 1; t <= cfg.trials; ++t) {
        auto r = run_trial(cfg, (uint64_t)t, opts);
        for (int i = 0; i < r.k - (int)r.leavers.size(); ++i) {
            w.field((long)r.trial).field(i).field(r.y_totals[i]).field(r.k_i_expected[i])
                .field(i < (int)r.overhead.size() ? r.overhead[i] : std::nan(""))
                .field(i < (int)r.completion_slot.size() ? r.completion_slot[i] : -1L)
                .field(r.lp_objective).field(r.v2v_transmissions).field(r.phase2_delay_s)
                .field((int)r.byte_exact);
            w.end_row();
        }
    }
    return {path};
}

} // namespace

std::vector<std::string> run_experiment(const SimConfig& cfg, const std::string& out_dir) {
    const std::string& e = cfg.experiment;
    if (e == "speed") return exp_speed(cfg, out_dir);
    if (e == "groupsize") return exp_groupsize(cfg, out_dir);
    if (e == "rankcdf") return exp_rankcdf(cfg, out_dir);
    if (e == "delay") return exp_delay(cfg, out_dir);
    if (e == "rate") return exp_rate(cfg, out_dir);
    if (e == "dynamics") return exp_dynamics(cfg, out_dir);
    if (e == "single") return exp_single(cfg, out_dir);
    throw ValidationError("unknown experiment '" + e + "'");
}

} // namespace batsv2x::harness
