#pragma once
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "batsv2x/errors.hpp"
#include "batsv2x/gfmat.hpp"
#include "batsv2x/rng.hpp"

namespace batsv2x::codec {

struct SourceFile {
    int f = 0;   // packet count
    int ell = 0; // bytes per packet
    std::vector<uint8_t> data;

    static SourceFile random(int f, int ell, Rng& rng);
    std::span<const uint8_t> packet(int i) const {
        return {data.data() + (size_t)i * ell, (size_t)ell};
    }
    void validate() const;
};

struct DegreeDistribution {
    std::vector<double> psi; // psi[d] for d = 1..d_max; psi[0] = 0

    int d_max() const { return (int)psi.size() - 1; }
    void validate() const; // nonnegative, sums to 1 within 1e-9
    std::vector<double> cumulative() const;
};

int sample_degree(const DegreeDistribution& dist, Rng& rng);

struct Batch {
    uint32_t index = 0;                 // 0-based batch id
    std::vector<uint32_t> contributors; // distinct source packet ids
    gf::Matrix generator;               // degree x M

    int degree() const { return (int)contributors.size(); }
};

struct CodedPacket {
    uint32_t batch_id = 0;
    std::vector<uint8_t> coeff;   // length M, coordinates over the batch basis
    std::vector<uint8_t> payload; // ell bytes
};

// Trace-file wire format: batch_id (4 bytes LE), M coeff bytes, ell payload bytes.
std::vector<uint8_t> serialize_packet(const CodedPacket& p);
CodedPacket parse_packet(std::span<const uint8_t> bytes, int m, int ell);

// One encoded batch at the RSU: metadata plus the M broadcast payload rows.
// The k-th broadcast packet carries unit coefficient e_k.
struct EncodedBatch {
    Batch meta;
    std::vector<uint8_t> payloads; // M x ell row-major

    std::span<const uint8_t> payload_row(int k, int ell) const {
        return {payloads.data() + (size_t)k * ell, (size_t)ell};
    }
    CodedPacket broadcast_packet(int k, int m, int ell) const;
};

EncodedBatch encode_batch(const SourceFile& file, uint32_t batch_id,
                          const DegreeDistribution& psi, int m, Rng& rng);

// Batch metadata variant without payload rows (structure-only simulations).
Batch make_batch_meta(int f, uint32_t batch_id, const DegreeDistribution& psi, int m, Rng& rng);

// Random nonzero combination of packets of one batch.
CodedPacket recode(std::span<const CodedPacket> received, Rng& rng);

// Shared per-trial encoding: batches plus the packet->batches incidence used
// by belief-propagation bookkeeping.
class BatchStore {
  public:
    BatchStore(int f, int m, int ell) : f_(f), m_(m), ell_(ell), incidence_(f) {}

    int f() const { return f_; }
    int m() const { return m_; }
    int ell() const { return ell_; }
    int batch_count() const { return (int)batches_.size(); }
    bool has_payloads() const { return with_payloads_; }

    uint32_t add(EncodedBatch b);
    uint32_t add_meta(Batch meta); // structure-only batch

    const Batch& meta(uint32_t j) const { return batches_[j]; }
    std::span<const uint8_t> payload_row(uint32_t j, int k) const;
    const std::vector<uint32_t>& batches_containing(uint32_t packet) const {
        return incidence_[packet];
    }

  private:
    int f_, m_, ell_;
    bool with_payloads_ = true;
    std::vector<Batch> batches_;
    std::vector<std::vector<uint8_t>> payloads_;
    std::vector<std::vector<uint32_t>> incidence_;
};

// Per-vehicle decoding state: received rows per batch (kept in echelon form
// over the M batch coordinates) plus an incremental belief-propagation pass
// tracking which source packets are recoverable.
class DecoderState {
  public:
    DecoderState(const BatchStore* store);

    int f() const { return store_->f(); }
    int m() const { return store_->m(); }

    // RSU broadcast packet k of batch j received (unit coefficient e_k).
    bool absorb_broadcast(uint32_t batch, int k);

    bool is_innovative(const CodedPacket& p) const;
    bool absorb(const CodedPacket& p); // stores iff innovative

    int batch_rank(uint32_t j) const;
    long total_rank() const { return total_rank_; }
    int received_broadcast(uint32_t j) const; // |N_i^[j]|
    uint32_t broadcast_mask(uint32_t j) const;

    bool can_recode(uint32_t j) const { return batch_rank(j) > 0; }
    CodedPacket recode_held(uint32_t j, Rng& rng) const;

    int recovered_count() const { return recovered_count_; }
    bool decode_complete() const { return recovered_count_ == store_->f(); }
    const std::vector<uint8_t>& recovered_mask() const { return recovered_; }

    // Structural fixpoint result (already maintained incrementally).
    std::vector<uint32_t> bp_recovered_indices() const;

    // Payload decode over the recovered set; throws InconsistentState on a
    // contradictory row. Returns f x ell bytes; unrecovered packets zeroed.
    std::vector<uint8_t> decode_file() const;

    // Ranks per batch (0..M each), for rank-distribution measurements.
    std::vector<int> rank_profile() const;

  private:
    struct BatchState {
        uint32_t mask = 0;              // received RSU packet positions
        int n_extra = 0;                // echelon rows beyond the mask rows
        std::vector<uint8_t> rows;      // n_extra x M, echelon, back-eliminated
        std::vector<uint8_t> payloads;  // n_extra x ell, transformed alongside
        std::vector<uint8_t> pivots;    // pivot column per extra row
        int unresolved = -1;            // lazily initialised to degree
        bool solved = false;
    };

    BatchState& state(uint32_t j);
    int rank_of(const BatchState& s) const { return __builtin_popcount(s.mask) + s.n_extra; }
    // reduce (coeff,payload) against mask + extras in place; returns pivot or -1
    int reduce_row(const BatchState& s, uint32_t j, uint8_t* coeff, uint8_t* payload) const;
    void ensure_unresolved(uint32_t j, BatchState& s);
    void enqueue_if_ready(uint32_t j);
    void drain_queue();
    bool try_solve(uint32_t j); // structural solve; true if batch resolved
    void mark_recovered(uint32_t packet);

    const BatchStore* store_;
    std::vector<BatchState> batch_states_;
    std::vector<uint8_t> recovered_;
    int recovered_count_ = 0;
    long total_rank_ = 0;
    std::vector<uint32_t> queue_;
    bool draining_ = false;
};

} // namespace batsv2x::codec
