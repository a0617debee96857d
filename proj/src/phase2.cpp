#include "batsv2x/phase2.hpp"

#include <algorithm>
#include <cmath>

namespace batsv2x::phase2 {

namespace {

// binomial pmf table row: C(n, s) p^s (1-p)^(n-s) for s = 0..n
std::vector<double> binom_pmf(int n, double p) {
    std::vector<double> out(n + 1, 0.0);
    double q = 1.0 - p;
    if (p <= 0) {
        out[0] = 1;
        return out;
    }
    if (q <= 0) {
        out[n] = 1;
        return out;
    }
    double pr = std::pow(q, n);
    for (int s = 0; s <= n; ++s) {
        out[s] = pr;
        if (s < n) pr = pr * (double)(n - s) / (s + 1) * (p / q);
    }
    return out;
}

} // namespace

double pr_y_given_y_held(int y, int y_held, double p_q, int m) {
    if (y < 0 || y > m || y_held < 0 || y_held > m)
        throw IndexOutOfRange("y and Y must lie in 0..M");
    if (y > y_held) return 0.0;
    auto pmf = binom_pmf(y_held, p_q);
    return pmf[y];
}

EventProbs event_probs(int t, int y_held, double p_q, double p_hat, int m) {
    if (t < 0 || t > m - 1) throw IndexOutOfRange("t must lie in 0..M-1");
    EventProbs ev;
    auto pmf_y = binom_pmf(y_held, p_q); // Pr(y | Y)
    // inner tail: P(Binom(t, 1 - p_hat) <= y - 1)
    auto pmf_l = binom_pmf(t, 1.0 - p_hat);
    std::vector<double> cdf_l(t + 1, 0.0);
    double run = 0;
    for (int l = 0; l <= t; ++l) {
        run += pmf_l[l];
        cdf_l[l] = run;
    }
    for (int y = 1; y <= t && y <= y_held; ++y)
        ev.e1 += pmf_y[y] * (y - 1 <= t ? cdf_l[std::min(y - 1, t)] : 1.0);
    for (int y = t + 1; y <= m; ++y)
        if (y <= y_held) ev.e2 += pmf_y[y];
    return ev;
}

double pr_innovative(int t, int y_held, double p_q, double p_hat, int m) {
    auto ev = event_probs(t, y_held, p_q, p_hat, m);
    return std::clamp(ev.e1 + ev.e2, 0.0, 1.0);
}

double total_utility(double peer_sum, Rng& rng) {
    return kUtilityScale * peer_sum + rng.uniform(0.0, kJitterMax);
}

UtilityTable build_utilities(int i, const phase1::ReceptionLedger& ledger,
                             const channel::LossProfile& profile, Rng& rng) {
    const int j_count = ledger.batches;
    const int m = ledger.batch_size;
    UtilityTable tab;
    tab.j_count = j_count;
    tab.m = m;
    tab.u.assign((size_t)j_count * m, 0.0);
    // peer_sum accumulated per (j, t) across peers, then scaled and jittered
    std::vector<double> sums((size_t)j_count * m, 0.0);
    for (int q = 0; q < profile.k; ++q) {
        if (q == i) continue;
        double p_hat = profile.v2v(i, q);
        // inner binomial tails depend only on (t, p_hat): precompute
        std::vector<std::vector<double>> cdf_l(m);
        for (int t = 0; t < m; ++t) {
            auto pmf_l = binom_pmf(t, 1.0 - p_hat);
            cdf_l[t].resize(t + 1);
            double run = 0;
            for (int l = 0; l <= t; ++l) {
                run += pmf_l[l];
                cdf_l[t][l] = run;
            }
        }
        for (int j = 0; j < j_count; ++j) {
            double p_q = channel::batch_loss_prob(j, q, profile);
            int y_held = ledger.y(i, j);
            auto pmf_y = binom_pmf(y_held, p_q);
            // suffix sums of pmf_y for the E2 part
            std::vector<double> tail(y_held + 2, 0.0);
            for (int y = y_held; y >= 1; --y) tail[y] = tail[y + 1] + pmf_y[y];
            for (int t = 0; t < m; ++t) {
                double e1 = 0;
                for (int y = 1; y <= t && y <= y_held; ++y)
                    e1 += pmf_y[y] * cdf_l[t][std::min(y - 1, t)];
                double e2 = t + 1 <= y_held ? tail[t + 1] : 0.0;
                sums[(size_t)j * m + t] += std::clamp(e1 + e2, 0.0, 1.0);
            }
        }
    }
    for (size_t idx = 0; idx < sums.size(); ++idx)
        tab.u[idx] = total_utility(sums[idx], rng);
    return tab;
}

TransmissionSchedule build_schedule(int i, const phase1::ReceptionLedger& ledger,
                                    const channel::LossProfile& profile, Rng& rng) {
    UtilityTable tab = build_utilities(i, ledger, profile, rng);
    std::vector<uint32_t> idx((size_t)tab.j_count * tab.m);
    for (uint32_t x = 0; x < idx.size(); ++x) idx[x] = x;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](uint32_t a, uint32_t b) { return tab.u[a] > tab.u[b]; });
    TransmissionSchedule sched;
    sched.order.resize(idx.size());
    for (size_t x = 0; x < idx.size(); ++x) sched.order[x] = idx[x] / tab.m;
    return sched;
}

SharingStats run_sharing(std::vector<codec::DecoderState>& decoders,
                         const std::vector<TransmissionSchedule>& schedules,
                         const channel::LossProfile& profile, const SharingOptions& opts,
                         const SlotTrace& trace) {
    const int k = (int)decoders.size();
    SharingStats st;
    st.tx_per_vehicle.assign(k, 0);
    st.completion_slot.assign(k, -1);

    Rng backoff_rng = Rng::substream(opts.seed, {0x0b});
    Rng rx_rng = Rng::substream(opts.seed, {0x0c});
    std::vector<Rng> code_rng;
    for (int i = 0; i < k; ++i) code_rng.push_back(Rng::substream(opts.seed, {0x0d, (uint64_t)i}));

    std::vector<bool> done(k);
    int undecoded = 0;
    for (int i = 0; i < k; ++i) {
        done[i] = decoders[i].decode_complete();
        if (done[i]) st.completion_slot[i] = 0;
        else ++undecoded;
    }
    std::vector<size_t> cursor(k, 0);
    std::vector<bool> can_serve(k);
    for (int i = 0; i < k; ++i) can_serve[i] = decoders[i].total_rank() > 0;

    long schedule_len = schedules.empty() ? 0 : (long)schedules[0].order.size();
    long stall_window = opts.stall_window > 0
                            ? opts.stall_window
                            : std::max<long>(10000, schedule_len / 2);
    long last_accept_slot = 0;
    bool snapshot_done = opts.bottleneck < 0;
    std::vector<int> backoff_order(k);
    std::vector<int> accepted_buf;

    while (undecoded > 0) {
        // transmitter pool: vehicles with at least one still-decoding peer
        // and something left to send
        int winner = -1;
        double best = 0;
        int pool = 0;
        for (int i = 0; i < k; ++i) {
            if (!can_serve[i]) continue;
            bool has_needy_peer = undecoded > (done[i] ? 0 : 1);
            if (!has_needy_peer) continue;
            double b = backoff_rng.uniform(0.0, opts.timing.dt_max_s);
            ++pool;
            if (winner < 0 || b < best) {
                winner = i;
                best = b;
            } else if (b == best) {
                // measure-zero tie: deterministic resample between the two
                winner = backoff_rng.bernoulli(0.5) ? winner : i;
            }
        }
        if (winner < 0) {
            st.stalled = true;
            break;
        }
        ++st.slots;

        // next held batch in the static schedule; wrap cyclically if spent
        const auto& order = schedules[winner].order;
        uint32_t batch = UINT32_MAX;
        size_t scanned = 0;
        while (scanned < order.size()) {
            if (cursor[winner] >= order.size()) {
                cursor[winner] = 0;
                st.schedule_exhausted = true;
            }
            uint32_t cand = order[cursor[winner]];
            ++cursor[winner];
            ++scanned;
            if (decoders[winner].can_recode(cand)) {
                batch = cand;
                break;
            }
        }
        if (batch == UINT32_MAX) {
            can_serve[winner] = false; // nothing held at all
            continue;
        }

        codec::CodedPacket pkt = decoders[winner].recode_held(batch, code_rng[winner]);
        ++st.transmissions;
        ++st.tx_per_vehicle[winner];

        if (trace) accepted_buf.assign(k, 0);
        for (int r = 0; r < k; ++r) {
            if (r == winner || done[r]) continue;
            bool received = channel::sample_reception(profile.v2v(winner, r), rx_rng);
            if (!received) continue;
            if (decoders[r].absorb(pkt)) {
                ++st.acceptances;
                last_accept_slot = st.slots;
                if (trace) accepted_buf[r] = 1;
                if (!snapshot_done && r == opts.bottleneck &&
                    decoders[r].total_rank() >= opts.rank_snapshot_target) {
                    st.bottleneck_ranks = decoders[r].rank_profile();
                    st.snapshot_slot = st.slots;
                    snapshot_done = true;
                }
                if (decoders[r].decode_complete()) {
                    done[r] = true;
                    st.completion_slot[r] = st.slots;
                    --undecoded; // stopping bit removes it from peer need
                }
            }
        }
        if (trace) trace(st.slots, winner, batch, accepted_buf);

        if (undecoded > 0 && st.slots - last_accept_slot > stall_window) {
            st.stalled = true;
            break;
        }
    }
    return st;
}

} // namespace batsv2x::phase2
