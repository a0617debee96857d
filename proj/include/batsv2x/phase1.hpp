#pragma once
#include <functional>
#include <vector>

#include "batsv2x/channel.hpp"
#include "batsv2x/codec.hpp"
#include "batsv2x/rng.hpp"

namespace batsv2x::phase1 {

// Who received which broadcast packets: reception sets per vehicle per batch.
struct ReceptionLedger {
    int k = 0;
    int batches = 0;
    int batch_size = 0;
    std::vector<uint32_t> masks; // k x batches position masks

    uint32_t mask(int i, int j) const { return masks[(size_t)i * batches + j]; }
    int y(int i, int j) const { return __builtin_popcount(mask(i, j)); }
    long total(int i) const;
};

// Per-packet reception sampling for all vehicles. When decoders are supplied
// (one per vehicle, bound to the shared BatchStore), received packets are
// absorbed as unit-coefficient rows. Reception randomness comes only from
// `rng`, so ledger contents are identical with or without decoders.
ReceptionLedger run_broadcast(const channel::LossProfile& profile, int batches, int batch_size,
                              std::vector<codec::DecoderState>* decoders, Rng& rng);

// Optional per-reception trace rows (n, j, i, received).
using TraceSink = std::function<void(int n, int j, int i, bool received)>;
ReceptionLedger run_broadcast_traced(const channel::LossProfile& profile, int batches,
                                     int batch_size, std::vector<codec::DecoderState>* decoders,
                                     Rng& rng, const TraceSink& sink);

struct ExpectedReception {
    std::vector<double> per_batch; // K^[j]
    double total = 0;              // sum over batches
};

// K_i^[j] = M (1 - P_i^[j]) and the per-vehicle total.
ExpectedReception expected_individual(const channel::LossProfile& profile, int vehicle);

// K_g^[j] = M (1 - P_g^[j]) over the group of the first k vehicles.
ExpectedReception expected_group(const channel::LossProfile& profile, int k);

} // namespace batsv2x::phase1
