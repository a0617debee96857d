#pragma once
#include "batsv2x/config.hpp"
#include "batsv2x/trial.hpp"

namespace batsv2x::harness {

// Comparator scheme: the file is split into F/M blocks, the RSU broadcasts
// M+1 random linear combinations per block (one redundant packet each), and
// the sharing phase schedules by rank difference with the same contention
// model. Every vehicle must reach rank M in every block to decode.
struct BaselineResult {
    uint64_t trial = 0;
    double phase1_duration_s = 0;
    int n_packets = 0;
    long v2v_slots = 0;
    long v2v_transmissions = 0;
    double phase2_delay_s = 0;
    bool all_completed = false;
    bool stalled = false;
    bool byte_exact = true;
    std::vector<long> completion_slot;
};

BaselineResult baseline_block_rlnc(const SimConfig& cfg, uint64_t trial);

} // namespace batsv2x::harness
