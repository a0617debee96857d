#pragma once
#include <cstdint>
#include <functional>
#include <vector>

#include "batsv2x/channel.hpp"
#include "batsv2x/codec.hpp"
#include "batsv2x/phase1.hpp"

namespace batsv2x::phase2 {

// P(y of the Y held packets of a batch were missed by the peer), peer batch
// loss p_q; zero for y > Y.
double pr_y_given_y_held(int y, int y_held, double p_q, int m);

struct EventProbs {
    double e1 = 0; // useful because earlier transmissions were lost
    double e2 = 0; // useful regardless of earlier receptions
};
EventProbs event_probs(int t, int y_held, double p_q, double p_hat, int m);

// P(the (t+1)-th coded packet of a batch is still innovative to the peer).
double pr_innovative(int t, int y_held, double p_q, double p_hat, int m);

constexpr double kUtilityScale = 1e6;  // separates utility levels from jitter
constexpr double kJitterMax = 10.0;    // tie-breaking jitter in (0, 10)

// kappa * sum over peers of pr_innovative + jitter.
double total_utility(double peer_sum, Rng& rng);

struct UtilityTable {
    int j_count = 0;
    int m = 0;
    std::vector<double> u; // J x M: U(i, [j], t+1)
    double at(int j, int t) const { return u[(size_t)j * m + t]; }
};

// Utilities of vehicle i for every batch and transmission count, from its
// reception counts and the loss profile.
UtilityTable build_utilities(int i, const phase1::ReceptionLedger& ledger,
                             const channel::LossProfile& profile, Rng& rng);

struct TransmissionSchedule {
    std::vector<uint32_t> order; // J*M batch ids, descending utility
};

TransmissionSchedule build_schedule(int i, const phase1::ReceptionLedger& ledger,
                                    const channel::LossProfile& profile, Rng& rng);

struct SharingTiming {
    double dt_max_s = 50e-6;     // contention window
    double t_packet_s = 2.0267e-3; // coded packet airtime (payload + header)
    double slot_s() const { return dt_max_s + t_packet_s; }
};

struct SharingOptions {
    SharingTiming timing;
    int bottleneck = -1;          // vehicle whose rank profile is snapshotted
    long rank_snapshot_target = 0; // total-rank threshold for the snapshot
    long stall_window = 0;        // 0: derived from schedule length
    uint64_t seed = 0;            // substream seed for backoff/reception/coding
};

// Per-slot trace: slot, transmitter, batch, per-receiver acceptance bits.
using SlotTrace = std::function<void(long slot, int tx, uint32_t batch,
                                     const std::vector<int>& accepted)>;

struct SharingStats {
    long slots = 0;
    long transmissions = 0;
    std::vector<long> tx_per_vehicle;
    std::vector<long> completion_slot; // -1 while undecoded
    bool schedule_exhausted = false;   // some vehicle wrapped onto its schedule again
    bool stalled = false;              // terminated without full group decode
    long acceptances = 0;
    std::vector<int> bottleneck_ranks; // snapshot at the rank target
    long snapshot_slot = -1;
    double delay_s(const SharingTiming& t) const { return slots * t.slot_s(); }
};

// Contention loop: every vehicle with at least one still-decoding peer draws
// a backoff; the winner broadcasts the next held batch of its schedule.
// Receivers that are still decoding absorb innovative packets. Vehicles that
// finish decoding announce it (stopping bit) and leave the peer-need count.
SharingStats run_sharing(std::vector<codec::DecoderState>& decoders,
                         const std::vector<TransmissionSchedule>& schedules,
                         const channel::LossProfile& profile, const SharingOptions& opts,
                         const SlotTrace& trace = nullptr);

} // namespace batsv2x::phase2
