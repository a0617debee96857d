#include "batsv2x/phase1.hpp"

namespace batsv2x::phase1 {

long ReceptionLedger::total(int i) const {
    long s = 0;
    for (int j = 0; j < batches; ++j) s += y(i, j);
    return s;
}

ReceptionLedger run_broadcast_traced(const channel::LossProfile& profile, int batches,
                                     int batch_size, std::vector<codec::DecoderState>* decoders,
                                     Rng& rng, const TraceSink& sink) {
    ReceptionLedger led;
    led.k = profile.k;
    led.batches = batches;
    led.batch_size = batch_size;
    led.masks.assign((size_t)profile.k * batches, 0);
    for (int j = 0; j < batches; ++j) {
        for (int kpos = 0; kpos < batch_size; ++kpos) {
            int n = j * batch_size + kpos;
            for (int i = 0; i < profile.k; ++i) {
                bool got = channel::sample_reception(profile.loss(i, n), rng);
                if (sink) sink(n, j, i, got);
                if (!got) continue;
                led.masks[(size_t)i * batches + j] |= 1u << kpos;
                if (decoders) (*decoders)[i].absorb_broadcast((uint32_t)j, kpos);
            }
        }
    }
    return led;
}

ReceptionLedger run_broadcast(const channel::LossProfile& profile, int batches, int batch_size,
                              std::vector<codec::DecoderState>* decoders, Rng& rng) {
    return run_broadcast_traced(profile, batches, batch_size, decoders, rng, nullptr);
}

ExpectedReception expected_individual(const channel::LossProfile& profile, int vehicle) {
    ExpectedReception e;
    int j_count = profile.batches();
    e.per_batch.resize(j_count);
    for (int j = 0; j < j_count; ++j) {
        e.per_batch[j] = profile.batch_size * (1.0 - channel::batch_loss_prob(j, vehicle, profile));
        e.total += e.per_batch[j];
    }
    return e;
}

ExpectedReception expected_group(const channel::LossProfile& profile, int k) {
    ExpectedReception e;
    int j_count = profile.batches();
    e.per_batch.resize(j_count);
    for (int j = 0; j < j_count; ++j) {
        e.per_batch[j] = profile.batch_size * (1.0 - channel::group_loss_prob(j, profile, k));
        e.total += e.per_batch[j];
    }
    return e;
}

} // namespace batsv2x::phase1
