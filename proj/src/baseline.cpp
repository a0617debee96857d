#include "batsv2x/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "batsv2x/gfmat.hpp"

namespace batsv2x::harness {

namespace {

struct SharedPacket {
    int block;
    std::vector<uint8_t> coeff;   // M over the block basis
    std::vector<uint8_t> payload; // ell
};

struct VehicleBlocks {
    std::vector<gf::RowBasis> basis;           // per block
    std::vector<std::vector<int>> shared_rows; // accepted broadcast rows
    std::vector<std::vector<uint8_t>> extra_coeff;
    std::vector<std::vector<uint8_t>> extra_payload;
    int full_blocks = 0;

    bool complete(int nblocks, int m) const { return full_blocks == nblocks; }
};

} // namespace

BaselineResult baseline_block_rlnc(const SimConfig& cfg, uint64_t trial) {
    cfg.validate();
    if (cfg.f % cfg.m != 0) throw ValidationError("block scheme needs M to divide F");
    const int m = cfg.m;
    const int nblocks = (int)(cfg.f / m);
    const int k = cfg.group.k;
    const int ell = cfg.ell;

    BaselineResult res;
    res.trial = trial;

    Rng scen_rng = Rng::substream(cfg.seed, {1, trial}); // same trajectory as the batch scheme
    auto traj = scenario::Trajectory::build(cfg.group, cfg.geo, scen_rng);
    res.phase1_duration_s = traj.window_end();
    auto [n_window, j_count] = scenario::broadcast_budget(traj, cfg.t_packet_s(), m);
    (void)j_count;
    if (n_window == 0) return res;
    auto profile = scenario::build_loss_profile(traj, cfg.chan, cfg.t_packet_s(), n_window, m);

    Rng src_rng = Rng::substream(cfg.seed, {102, trial});
    auto file = codec::SourceFile::random((int)cfg.f, ell, src_rng);

    // RSU sends M+1 combinations per block, as far as the window allows
    int n_send = std::min((long)n_window, (long)nblocks * (m + 1));
    res.n_packets = n_send;
    Rng enc_rng = Rng::substream(cfg.seed, {103, trial});
    std::vector<SharedPacket> pool((size_t)n_send);
    for (int n = 0; n < n_send; ++n) {
        SharedPacket& p = pool[n];
        p.block = n / (m + 1);
        p.coeff.assign(m, 0);
        bool nz = false;
        while (!nz)
            for (auto& c : p.coeff) {
                c = enc_rng.byte();
                nz |= c != 0;
            }
        p.payload.assign(ell, 0);
        for (int i = 0; i < m; ++i)
            gf::muladd(p.payload.data(), file.packet(p.block * m + i).data(), p.coeff[i], ell);
    }

    std::vector<VehicleBlocks> veh(k);
    for (auto& v : veh) {
        v.basis.assign(nblocks, gf::RowBasis(m));
        v.shared_rows.resize(nblocks);
        v.extra_coeff.resize(nblocks);
        v.extra_payload.resize(nblocks);
    }
    auto absorb_shared = [&](int i, int n) {
        auto& v = veh[i];
        const auto& p = pool[n];
        int before = v.basis[p.block].rank();
        if (!v.basis[p.block].insert(p.coeff)) return;
        v.shared_rows[p.block].push_back(n);
        if (before + 1 == m) ++v.full_blocks;
    };

    Rng rx_rng = Rng::substream(cfg.seed, {104, trial});
    for (int n = 0; n < n_send; ++n)
        for (int i = 0; i < k; ++i)
            if (channel::sample_reception(profile.loss(i, n), rx_rng)) absorb_shared(i, n);

    // sharing phase: rank-difference utility with exchanged status
    phase2::SharingTiming timing;
    timing.dt_max_s = cfg.dt_max_us * 1e-6;
    timing.t_packet_s = cfg.t_packet_v2v_s();

    Rng backoff_rng = Rng::substream(cfg.seed, {105, trial});
    Rng vrx_rng = Rng::substream(cfg.seed, {106, trial});
    std::vector<Rng> code_rng;
    for (int i = 0; i < k; ++i) code_rng.push_back(Rng::substream(cfg.seed, {107, trial, (uint64_t)i}));

    res.completion_slot.assign(k, -1);
    int undecoded = 0;
    for (int i = 0; i < k; ++i) {
        if (veh[i].complete(nblocks, m)) res.completion_slot[i] = 0;
        else ++undecoded;
    }

    long last_accept = 0;
    const long stall_window = std::max<long>(10000, (long)nblocks * m / 2);
    std::vector<uint8_t> tx_coeff(m), tx_payload(ell);
    while (undecoded > 0) {
        int winner = -1;
        double best = 0;
        for (int i = 0; i < k; ++i) {
            bool needy_peer = undecoded > (res.completion_slot[i] >= 0 ? 0 : 1);
            if (!needy_peer) continue;
            double b = backoff_rng.uniform(0.0, timing.dt_max_s);
            if (winner < 0 || b < best) {
                winner = i;
                best = b;
            }
        }
        if (winner < 0) {
            res.stalled = true;
            break;
        }
        ++res.v2v_slots;

        // block with the largest total rank advantage over still-needy peers
        auto& w = veh[winner];
        int block = -1;
        long best_u = 0;
        for (int blk = 0; blk < nblocks; ++blk) {
            int rw = w.basis[blk].rank();
            if (rw == 0) continue;
            long u = 0;
            for (int q = 0; q < k; ++q) {
                if (q == winner || res.completion_slot[q] >= 0) continue;
                int rq = veh[q].basis[blk].rank();
                if (rw > rq) u += rw - rq;
            }
            if (u > best_u) {
                best_u = u;
                block = blk;
            }
        }
        if (block < 0) continue; // nothing useful to offer this slot

        // random combination of everything held for the block
        auto& rngw = code_rng[winner];
        std::fill(tx_coeff.begin(), tx_coeff.end(), 0);
        std::fill(tx_payload.begin(), tx_payload.end(), 0);
        bool nz = false;
        while (!nz) {
            nz = false;
            std::fill(tx_coeff.begin(), tx_coeff.end(), 0);
            std::fill(tx_payload.begin(), tx_payload.end(), 0);
            for (int rrow : w.shared_rows[block]) {
                uint8_t g = rngw.byte();
                if (!g) continue;
                nz = true;
                gf::muladd(tx_coeff.data(), pool[rrow].coeff.data(), g, m);
                gf::muladd(tx_payload.data(), pool[rrow].payload.data(), g, ell);
            }
            for (size_t e = 0; e < w.extra_coeff[block].size() / m; ++e) {
                uint8_t g = rngw.byte();
                if (!g) continue;
                nz = true;
                gf::muladd(tx_coeff.data(), w.extra_coeff[block].data() + e * m, g, m);
                gf::muladd(tx_payload.data(), w.extra_payload[block].data() + e * ell, g, ell);
            }
        }
        ++res.v2v_transmissions;

        for (int r = 0; r < k; ++r) {
            if (r == winner || res.completion_slot[r] >= 0) continue;
            if (!channel::sample_reception(profile.v2v(winner, r), vrx_rng)) continue;
            auto& vr = veh[r];
            int before = vr.basis[block].rank();
            if (!vr.basis[block].insert(tx_coeff)) continue;
            vr.extra_coeff[block].insert(vr.extra_coeff[block].end(), tx_coeff.begin(), tx_coeff.end());
            vr.extra_payload[block].insert(vr.extra_payload[block].end(), tx_payload.begin(), tx_payload.end());
            last_accept = res.v2v_slots;
            if (before + 1 == m) {
                ++vr.full_blocks;
                if (vr.complete(nblocks, m)) {
                    res.completion_slot[r] = res.v2v_slots;
                    --undecoded;
                }
            }
        }
        if (undecoded > 0 && res.v2v_slots - last_accept > stall_window) {
            res.stalled = true;
            break;
        }
    }
    res.phase2_delay_s = res.v2v_slots * timing.slot_s();
    res.all_completed = undecoded == 0;

    // decode every completed vehicle block by block and compare
    std::vector<uint8_t> aug((size_t)m * (m + ell));
    for (int i = 0; i < k && res.byte_exact; ++i) {
        if (res.completion_slot[i] < 0) continue;
        auto& v = veh[i];
        for (int blk = 0; blk < nblocks && res.byte_exact; ++blk) {
            std::fill(aug.begin(), aug.end(), 0);
            int r = 0;
            const size_t w = m + ell;
            for (int rrow : v.shared_rows[blk]) {
                std::memcpy(aug.data() + r * w, pool[rrow].coeff.data(), m);
                std::memcpy(aug.data() + r * w + m, pool[rrow].payload.data(), ell);
                ++r;
            }
            for (size_t e = 0; e < v.extra_coeff[blk].size() / m; ++e) {
                std::memcpy(aug.data() + r * w, v.extra_coeff[blk].data() + e * m, m);
                std::memcpy(aug.data() + r * w + m, v.extra_payload[blk].data() + e * ell, ell);
                ++r;
            }
            // Gauss-Jordan on the m x m leading block
            for (int c = 0; c < m; ++c) {
                int p = -1;
                for (int rr = c; rr < r; ++rr)
                    if (aug[rr * w + c]) { p = rr; break; }
                if (p < 0) { res.byte_exact = false; break; }
                if (p != c)
                    std::swap_ranges(aug.begin() + p * w, aug.begin() + (p + 1) * w, aug.begin() + c * w);
                gf::scale(aug.data() + c * w, gf::inv(aug[c * w + c]), w);
                for (int rr = 0; rr < r; ++rr) {
                    if (rr == c) continue;
                    uint8_t fct = aug[rr * w + c];
                    if (fct) gf::muladd(aug.data() + rr * w, aug.data() + c * w, fct, w);
                }
            }
            for (int c = 0; c < m && res.byte_exact; ++c) {
                if (std::memcmp(aug.data() + c * w + m, file.packet(blk * m + c).data(), ell) != 0)
                    res.byte_exact = false;
            }
        }
    }
    return res;
}

} // namespace batsv2x::harness
