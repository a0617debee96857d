#include "batsv2x/codec.hpp"

#include <algorithm>
#include <cstring>

namespace batsv2x::codec {

SourceFile SourceFile::random(int f, int ell, Rng& rng) {
    SourceFile s;
    s.f = f;
    s.ell = ell;
    s.data.resize((size_t)f * ell);
    for (auto& b : s.data) b = rng.byte();
    return s;
}

void SourceFile::validate() const {
    if (f < 1) throw ValidationError("file must contain at least one packet");
    if (ell < 1) throw ValidationError("packet length must be positive");
    if (data.size() != (size_t)f * ell) throw ValidationError("payload buffer size mismatch");
}

void DegreeDistribution::validate() const {
    if (psi.size() < 2) throw ValidationError("degree distribution needs support");
    double sum = 0;
    for (double p : psi) {
        if (p < 0) throw ValidationError("degree probabilities must be nonnegative");
        sum += p;
    }
    if (psi[0] != 0) throw ValidationError("degree 0 must carry no mass");
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("degree distribution must sum to 1");
}

std::vector<double> DegreeDistribution::cumulative() const {
    std::vector<double> c(psi.size());
    double s = 0;
    for (size_t d = 0; d < psi.size(); ++d) {
        s += psi[d];
        c[d] = s;
    }
    return c;
}

int sample_degree(const DegreeDistribution& dist, Rng& rng) {
    double u = rng.uniform();
    double s = 0;
    int last = 1;
    for (int d = 1; d <= dist.d_max(); ++d) {
        if (dist.psi[d] <= 0) continue;
        s += dist.psi[d];
        last = d;
        if (u < s) return d;
    }
    return last; // u landed in the final rounding sliver
}

Batch make_batch_meta(int f, uint32_t batch_id, const DegreeDistribution& psi, int m, Rng& rng) {
    Batch b;
    b.index = batch_id;
    int d = std::min(sample_degree(psi, rng), f);
    b.contributors = rng.sample_without_replacement((uint32_t)f, (uint32_t)d);
    b.generator = gf::Matrix(d, m);
    for (auto& v : b.generator.a) v = rng.byte();
    return b;
}

EncodedBatch encode_batch(const SourceFile& file, uint32_t batch_id,
                          const DegreeDistribution& psi, int m, Rng& rng) {
    EncodedBatch eb;
    eb.meta = make_batch_meta(file.f, batch_id, psi, m, rng);
    eb.payloads.assign((size_t)m * file.ell, 0);
    const int d = eb.meta.degree();
    for (int i = 0; i < d; ++i) {
        auto src = file.packet((int)eb.meta.contributors[i]);
        for (int k = 0; k < m; ++k)
            gf::muladd(eb.payloads.data() + (size_t)k * file.ell, src.data(),
                       eb.meta.generator.at(i, k), (size_t)file.ell);
    }
    return eb;
}

CodedPacket EncodedBatch::broadcast_packet(int k, int m, int ell) const {
    CodedPacket p;
    p.batch_id = meta.index;
    p.coeff.assign((size_t)m, 0);
    p.coeff[k] = 1;
    auto row = payload_row(k, ell);
    p.payload.assign(row.begin(), row.end());
    return p;
}

std::vector<uint8_t> serialize_packet(const CodedPacket& p) {
    std::vector<uint8_t> out;
    out.reserve(4 + p.coeff.size() + p.payload.size());
    for (int i = 0; i < 4; ++i) out.push_back((uint8_t)(p.batch_id >> (8 * i)));
    out.insert(out.end(), p.coeff.begin(), p.coeff.end());
    out.insert(out.end(), p.payload.begin(), p.payload.end());
    return out;
}

CodedPacket parse_packet(std::span<const uint8_t> bytes, int m, int ell) {
    if (bytes.size() != 4 + (size_t)m + (size_t)ell)
        throw ParseError("coded packet record has the wrong length");
    CodedPacket p;
    p.batch_id = 0;
    for (int i = 0; i < 4; ++i) p.batch_id |= (uint32_t)bytes[i] << (8 * i);
    p.coeff.assign(bytes.begin() + 4, bytes.begin() + 4 + m);
    p.payload.assign(bytes.begin() + 4 + m, bytes.end());
    return p;
}

CodedPacket recode(std::span<const CodedPacket> received, Rng& rng) {
    if (received.empty()) throw EmptyBatchBuffer("recode needs at least one stored packet");
    const auto& first = received[0];
    for (const auto& p : received)
        if (p.batch_id != first.batch_id)
            throw InconsistentState("recode inputs must share a batch id");
    size_t t = received.size();
    std::vector<uint8_t> gamma(t);
    bool nonzero = false;
    while (!nonzero) {
        for (auto& g : gamma) {
            g = rng.byte();
            nonzero |= g != 0;
        }
    }
    CodedPacket out;
    out.batch_id = first.batch_id;
    out.coeff.assign(first.coeff.size(), 0);
    out.payload.assign(first.payload.size(), 0);
    for (size_t i = 0; i < t; ++i) {
        gf::muladd(out.coeff.data(), received[i].coeff.data(), gamma[i], out.coeff.size());
        gf::muladd(out.payload.data(), received[i].payload.data(), gamma[i], out.payload.size());
    }
    return out;
}

uint32_t BatchStore::add(EncodedBatch b) {
    uint32_t id = (uint32_t)batches_.size();
    for (uint32_t c : b.meta.contributors) incidence_[c].push_back(id);
    batches_.push_back(std::move(b.meta));
    payloads_.push_back(std::move(b.payloads));
    return id;
}

uint32_t BatchStore::add_meta(Batch meta) {
    uint32_t id = (uint32_t)batches_.size();
    with_payloads_ = false;
    for (uint32_t c : meta.contributors) incidence_[c].push_back(id);
    batches_.push_back(std::move(meta));
    payloads_.emplace_back();
    return id;
}

std::span<const uint8_t> BatchStore::payload_row(uint32_t j, int k) const {
    return {payloads_[j].data() + (size_t)k * ell_, (size_t)ell_};
}

DecoderState::DecoderState(const BatchStore* store)
    : store_(store), recovered_((size_t)store->f(), 0) {}

DecoderState::BatchState& DecoderState::state(uint32_t j) {
    if (j >= batch_states_.size()) batch_states_.resize(std::max<size_t>(j + 1, store_->batch_count()));
    return batch_states_[j];
}

int DecoderState::batch_rank(uint32_t j) const {
    if (j >= batch_states_.size()) return 0;
    return rank_of(batch_states_[j]);
}

int DecoderState::received_broadcast(uint32_t j) const {
    if (j >= batch_states_.size()) return 0;
    return __builtin_popcount(batch_states_[j].mask);
}

uint32_t DecoderState::broadcast_mask(uint32_t j) const {
    if (j >= batch_states_.size()) return 0;
    return batch_states_[j].mask;
}

int DecoderState::reduce_row(const BatchState& s, uint32_t j, uint8_t* coeff, uint8_t* payload) const {
    const int m = store_->m();
    const bool with_payload = payload != nullptr && store_->has_payloads();
    for (int k = 0; k < m; ++k) {
        if (!(s.mask >> k & 1u)) continue;
        uint8_t f = coeff[k];
        if (!f) continue;
        coeff[k] = 0;
        if (with_payload)
            gf::muladd(payload, store_->payload_row(j, k).data(), f, (size_t)store_->ell());
    }
    for (int r = 0; r < s.n_extra; ++r) {
        uint8_t f = coeff[s.pivots[r]];
        if (!f) continue;
        gf::muladd(coeff, s.rows.data() + (size_t)r * m, f, (size_t)m);
        if (with_payload && !s.payloads.empty())
            gf::muladd(payload, s.payloads.data() + (size_t)r * store_->ell(), f, (size_t)store_->ell());
    }
    for (int c = 0; c < m; ++c)
        if (coeff[c]) return c;
    return -1;
}

bool DecoderState::absorb_broadcast(uint32_t batch, int k) {
    BatchState& s = state(batch);
    if (s.mask >> k & 1u) return false;
    if (s.n_extra == 0) {
        s.mask |= 1u << k;
    } else {
        // rare general path: unit row arriving after coded rows
        CodedPacket p;
        p.batch_id = batch;
        p.coeff.assign((size_t)store_->m(), 0);
        p.coeff[k] = 1;
        if (store_->has_payloads()) {
            auto row = store_->payload_row(batch, k);
            p.payload.assign(row.begin(), row.end());
        }
        if (!absorb(p)) return false;
        return true;
    }
    ++total_rank_;
    ensure_unresolved(batch, s);
    enqueue_if_ready(batch);
    drain_queue();
    return true;
}

bool DecoderState::is_innovative(const CodedPacket& p) const {
    if (p.batch_id >= batch_states_.size()) {
        for (uint8_t c : p.coeff)
            if (c) return true;
        return false;
    }
    const BatchState& s = batch_states_[p.batch_id];
    std::vector<uint8_t> coeff(p.coeff);
    return reduce_row(s, p.batch_id, coeff.data(), nullptr) >= 0;
}

bool DecoderState::absorb(const CodedPacket& p) {
    BatchState& s = state(p.batch_id);
    const int m = store_->m();
    const int ell = store_->ell();
    std::vector<uint8_t> coeff(p.coeff);
    std::vector<uint8_t> payload(p.payload);
    uint8_t* pl = payload.empty() ? nullptr : payload.data();
    int piv = reduce_row(s, p.batch_id, coeff.data(), pl);
    if (piv < 0) return false;
    uint8_t iv = gf::inv(coeff[piv]);
    gf::scale(coeff.data(), iv, coeff.size());
    if (pl) gf::scale(pl, iv, payload.size());
    // back-eliminate existing extras at the new pivot
    for (int r = 0; r < s.n_extra; ++r) {
        uint8_t f = s.rows[(size_t)r * m + piv];
        if (!f) continue;
        gf::muladd(s.rows.data() + (size_t)r * m, coeff.data(), f, (size_t)m);
        if (pl && !s.payloads.empty())
            gf::muladd(s.payloads.data() + (size_t)r * ell, pl, f, (size_t)ell);
    }
    int pos = 0;
    while (pos < s.n_extra && s.pivots[pos] < piv) ++pos;
    s.rows.insert(s.rows.begin() + (size_t)pos * m, coeff.begin(), coeff.end());
    if (pl) s.payloads.insert(s.payloads.begin() + (size_t)pos * ell, payload.begin(), payload.end());
    s.pivots.insert(s.pivots.begin() + pos, (uint8_t)piv);
    ++s.n_extra;
    ++total_rank_;
    ensure_unresolved(p.batch_id, s);
    enqueue_if_ready(p.batch_id);
    drain_queue();
    return true;
}

CodedPacket DecoderState::recode_held(uint32_t j, Rng& rng) const {
    const int m = store_->m();
    const int ell = store_->ell();
    if (batch_rank(j) == 0) throw EmptyBatchBuffer("no stored packets for this batch");
    const BatchState& s = batch_states_[j];
    int t = rank_of(s);
    std::vector<uint8_t> gamma((size_t)t);
    bool nonzero = false;
    while (!nonzero)
        for (auto& g : gamma) {
            g = rng.byte();
            nonzero |= g != 0;
        }
    CodedPacket out;
    out.batch_id = j;
    out.coeff.assign((size_t)m, 0);
    out.payload.assign((size_t)ell, 0);
    int gi = 0;
    for (int k = 0; k < m; ++k) {
        if (!(s.mask >> k & 1u)) continue;
        uint8_t g = gamma[gi++];
        out.coeff[k] ^= g; // unit coefficient scaled by g
        if (g && store_->has_payloads())
            gf::muladd(out.payload.data(), store_->payload_row(j, k).data(), g, (size_t)ell);
    }
    for (int r = 0; r < s.n_extra; ++r) {
        uint8_t g = gamma[gi++];
        if (!g) continue;
        gf::muladd(out.coeff.data(), s.rows.data() + (size_t)r * m, g, (size_t)m);
        if (!s.payloads.empty())
            gf::muladd(out.payload.data(), s.payloads.data() + (size_t)r * ell, g, (size_t)ell);
    }
    return out;
}

void DecoderState::ensure_unresolved(uint32_t j, BatchState& s) {
    if (s.unresolved >= 0) return;
    const Batch& b = store_->meta(j);
    int u = 0;
    for (uint32_t c : b.contributors)
        if (!recovered_[c]) ++u;
    s.unresolved = u;
    if (u == 0) s.solved = true;
}

void DecoderState::enqueue_if_ready(uint32_t j) {
    BatchState& s = batch_states_[j];
    if (s.solved || s.unresolved < 0) return;
    if (s.unresolved > 0 && s.unresolved <= rank_of(s)) queue_.push_back(j);
}

void DecoderState::mark_recovered(uint32_t packet) {
    if (recovered_[packet]) return;
    recovered_[packet] = 1;
    ++recovered_count_;
    for (uint32_t j2 : store_->batches_containing(packet)) {
        if (j2 >= batch_states_.size()) continue;
        BatchState& s2 = batch_states_[j2];
        if (s2.solved) continue;
        if (s2.unresolved < 0) continue; // untouched batch: lazily counted later
        if (--s2.unresolved == 0) {
            s2.solved = true;
            continue;
        }
        enqueue_if_ready(j2);
    }
}

void DecoderState::drain_queue() {
    while (!queue_.empty()) {
        uint32_t j = queue_.back();
        queue_.pop_back();
        BatchState& s = batch_states_[j];
        if (s.solved) continue;
        ensure_unresolved(j, s);
        if (s.solved || s.unresolved <= 0) continue;
        if (s.unresolved <= rank_of(s)) try_solve(j);
    }
}

bool DecoderState::try_solve(uint32_t j) {
    BatchState& s = batch_states_[j];
    const Batch& b = store_->meta(j);
    const int m = store_->m();
    // unresolved contributor positions and packet ids
    std::vector<int> upos;
    std::vector<uint32_t> uid;
    for (int i = 0; i < b.degree(); ++i) {
        if (!recovered_[b.contributors[i]]) {
            upos.push_back(i);
            uid.push_back(b.contributors[i]);
        }
    }
    const int du = (int)upos.size();
    if (du == 0) {
        s.solved = true;
        s.unresolved = 0;
        return true;
    }
    // effective rows restricted to the unresolved contributors
    gf::Matrix a(rank_of(s), du);
    int r = 0;
    for (int k = 0; k < m; ++k) {
        if (!(s.mask >> k & 1u)) continue;
        for (int u = 0; u < du; ++u) a.at(r, u) = b.generator.at(upos[u], k);
        ++r;
    }
    for (int e = 0; e < s.n_extra; ++e) {
        const uint8_t* c = s.rows.data() + (size_t)e * m;
        for (int u = 0; u < du; ++u) {
            uint8_t acc = 0;
            for (int k = 0; k < m; ++k)
                if (c[k]) acc ^= gf::mul(b.generator.at(upos[u], k), c[k]);
            a.at(r, u) = acc;
        }
        ++r;
    }
    if (gf::rank(std::move(a)) < du) return false;
    s.solved = true;
    s.unresolved = 0;
    for (uint32_t id : uid) mark_recovered(id);
    return true;
}

std::vector<uint32_t> DecoderState::bp_recovered_indices() const {
    std::vector<uint32_t> out;
    out.reserve(recovered_count_);
    for (uint32_t i = 0; i < recovered_.size(); ++i)
        if (recovered_[i]) out.push_back(i);
    return out;
}

std::vector<int> DecoderState::rank_profile() const {
    std::vector<int> out(store_->batch_count(), 0);
    for (size_t j = 0; j < batch_states_.size() && j < out.size(); ++j)
        out[j] = rank_of(batch_states_[j]);
    return out;
}

std::vector<uint8_t> DecoderState::decode_file() const {
    const int f = store_->f();
    const int m = store_->m();
    const int ell = store_->ell();
    if (!store_->has_payloads()) throw InconsistentState("store carries no payloads");
    std::vector<uint8_t> out((size_t)f * ell, 0);
    std::vector<uint8_t> done((size_t)f, 0);
    int ndone = 0;
    const int nbatches = (int)batch_states_.size();
    std::vector<int> unres(nbatches, -1);
    std::vector<uint8_t> solved(nbatches, 0);
    std::vector<uint32_t> queue;

    auto count_unres = [&](uint32_t j) {
        const Batch& b = store_->meta(j);
        int u = 0;
        for (uint32_t c : b.contributors)
            if (!done[c]) ++u;
        return u;
    };
    for (int j = 0; j < nbatches; ++j) {
        if (rank_of(batch_states_[j]) == 0) continue;
        unres[j] = count_unres(j);
        if (unres[j] > 0 && unres[j] <= rank_of(batch_states_[j])) queue.push_back(j);
    }

    std::vector<uint8_t> scratch;
    while (!queue.empty()) {
        uint32_t j = queue.back();
        queue.pop_back();
        if (solved[j]) continue;
        const BatchState& s = batch_states_[j];
        const Batch& b = store_->meta(j);
        if (unres[j] <= 0 || unres[j] > rank_of(s)) continue;

        std::vector<int> upos;
        std::vector<uint32_t> uid;
        for (int i = 0; i < b.degree(); ++i)
            if (!done[b.contributors[i]]) {
                upos.push_back(i);
                uid.push_back(b.contributors[i]);
            }
        const int du = (int)upos.size();
        const int nrows = rank_of(s);
        const size_t w = (size_t)du + ell; // augmented row: coeffs | payload
        scratch.assign((size_t)nrows * w, 0);

        auto fill_row = [&](int r, const uint8_t* eff /* length degree */, const uint8_t* base_payload) {
            uint8_t* row = scratch.data() + (size_t)r * w;
            for (int u = 0; u < du; ++u) row[u] = eff[upos[u]];
            std::memcpy(row + du, base_payload, (size_t)ell);
            for (int i = 0; i < b.degree(); ++i) {
                if (done[b.contributors[i]] && eff[i])
                    gf::muladd(row + du, out.data() + (size_t)b.contributors[i] * ell, eff[i], (size_t)ell);
            }
        };

        std::vector<uint8_t> eff((size_t)b.degree());
        int r = 0;
        for (int k = 0; k < m; ++k) {
            if (!(s.mask >> k & 1u)) continue;
            for (int i = 0; i < b.degree(); ++i) eff[i] = b.generator.at(i, k);
            fill_row(r++, eff.data(), store_->payload_row(j, k).data());
        }
        for (int e = 0; e < s.n_extra; ++e) {
            const uint8_t* c = s.rows.data() + (size_t)e * m;
            for (int i = 0; i < b.degree(); ++i) {
                uint8_t acc = 0;
                for (int k = 0; k < m; ++k)
                    if (c[k]) acc ^= gf::mul(b.generator.at(i, k), c[k]);
                eff[i] = acc;
            }
            fill_row(r++, eff.data(), s.payloads.data() + (size_t)e * ell);
        }

        // eliminate over the du unknown columns
        int rk = 0;
        for (int c = 0; c < du && rk < nrows; ++c) {
            int p = -1;
            for (int i = rk; i < nrows; ++i)
                if (scratch[(size_t)i * w + c]) { p = i; break; }
            if (p < 0) continue;
            if (p != rk)
                std::swap_ranges(scratch.begin() + (size_t)p * w, scratch.begin() + (size_t)(p + 1) * w,
                                 scratch.begin() + (size_t)rk * w);
            uint8_t* prow = scratch.data() + (size_t)rk * w;
            gf::scale(prow, gf::inv(prow[c]), w);
            for (int i = 0; i < nrows; ++i) {
                if (i == rk) continue;
                uint8_t* rowi = scratch.data() + (size_t)i * w;
                if (rowi[c]) gf::muladd(rowi, prow, rowi[c], w);
            }
            ++rk;
        }
        // consistency: rows that vanished on the unknown columns must carry
        // zero payload residue
        for (int i = rk; i < nrows; ++i) {
            const uint8_t* rowi = scratch.data() + (size_t)i * w;
            bool zc = true;
            for (int c = 0; c < du; ++c) zc &= rowi[c] == 0;
            if (!zc) continue;
            for (int c = du; c < (int)w; ++c)
                if (rowi[c]) throw InconsistentState("contradictory row during decode");
        }
        if (rk < du) continue; // rank deficient; may resolve later

        solved[j] = 1;
        unres[j] = 0;
        for (int i = 0; i < rk && i < du; ++i) {
            // row i has a single pivot among the unknowns after full reduction
            const uint8_t* rowi = scratch.data() + (size_t)i * w;
            int c = -1;
            for (int u = 0; u < du; ++u)
                if (rowi[u]) { c = u; break; }
            if (c < 0) continue;
            uint32_t pkt = uid[c];
            std::memcpy(out.data() + (size_t)pkt * ell, rowi + du, (size_t)ell);
            done[pkt] = 1;
            ++ndone;
            for (uint32_t j2 : store_->batches_containing(pkt)) {
                if ((int)j2 >= nbatches || solved[j2] || unres[j2] < 0) continue;
                if (--unres[j2] > 0 && unres[j2] <= rank_of(batch_states_[j2])) queue.push_back(j2);
            }
        }
    }
    if (ndone != recovered_count_)
        throw InconsistentState("payload fixpoint diverged from the structural pass");
    return out;
}

} // namespace batsv2x::codec
