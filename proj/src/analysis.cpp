#include "batsv2x/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "batsv2x/phase1.hpp"
#include "batsv2x/simplex.hpp"

namespace batsv2x::analysis {

LpSolution lp_lower_bound(const LpInstance& inst) {
    const int k = inst.k;
    // maximize -sum X  s.t.  -sum_{q!=i}(1-p)X_q <= -(F - Y_i),  X_i <= Y_i
    Simplex::Mat a;
    Simplex::Vec b;
    for (int i = 0; i < k; ++i) {
        double deficit = (double)inst.f - inst.y_sums[i];
        Simplex::Vec row(k, 0.0);
        for (int q = 0; q < k; ++q)
            if (q != i) row[q] = -(1.0 - inst.v2v(q, i));
        a.push_back(std::move(row));
        b.push_back(-deficit);
    }
    for (int i = 0; i < k; ++i) {
        Simplex::Vec row(k, 0.0);
        row[i] = 1.0;
        a.push_back(std::move(row));
        b.push_back(inst.y_sums[i]);
    }
    Simplex::Vec c(k, -1.0);
    LpSolution sol;
    double obj = Simplex(a, b, c).solve(sol.x);
    if (obj == -Simplex::kInf) {
        sol.feasible = false;
        throw Infeasible("group cannot cover some vehicle's deficit");
    }
    sol.feasible = true;
    sol.objective = -obj;
    for (auto& v : sol.x) v = std::max(0.0, v);
    return sol;
}

double innovative_set_size(int i, int j, int q, const channel::LossProfile& profile) {
    if (i == q) throw IndexOutOfRange("innovative set needs two distinct vehicles");
    const int m = profile.batch_size;
    double s = 0;
    for (int n = j * m; n < (j + 1) * m; ++n)
        s += (1.0 - profile.loss(i, n)) * profile.loss(q, n);
    return s;
}

SelectionProbs batch_selection_prob(const channel::LossProfile& profile, int k) {
    const int j_count = profile.batches();
    SelectionProbs out;
    out.rho.assign((size_t)k * j_count, 0.0);
    out.degenerate.assign(k, false);
    for (int i = 0; i < k; ++i) {
        double total = 0;
        for (int j = 0; j < j_count; ++j) {
            double w = 0;
            for (int q = 0; q < k; ++q)
                if (q != i) w += innovative_set_size(i, j, q, profile);
            out.rho[(size_t)i * j_count + j] = w;
            total += w;
        }
        if (total <= 0) {
            out.degenerate[i] = true;
            for (int j = 0; j < j_count; ++j) out.rho[(size_t)i * j_count + j] = 1.0 / j_count;
        } else {
            for (int j = 0; j < j_count; ++j) out.rho[(size_t)i * j_count + j] /= total;
        }
    }
    return out;
}

int map_w(int s, int b, int k) {
    if (s < 1 || s > k - 1) throw IndexOutOfRange("peer index outside 1..k-1");
    return s < b ? s : s + 1;
}

double intersection_size(const std::vector<int>& peers, int j, int b,
                         const channel::LossProfile& profile) {
    const int m = profile.batch_size;
    double s = 0;
    for (int n = j * m; n < (j + 1) * m; ++n) {
        double prod = 1.0;
        for (int p : peers) prod *= 1.0 - profile.loss(p, n);
        s += prod * profile.loss(b, n);
    }
    return s;
}

namespace {

// Explicit inclusion-exclusion over all peer subsets (reference path).
double innovative_content_enum(int j, int b, const channel::LossProfile& profile,
                               const SelectionProbs& rho, const std::vector<int>& peers) {
    const int np = (int)peers.size();
    const int j_count = profile.batches();
    double total = 0;
    for (uint32_t mask = 1; mask < (1u << np); ++mask) {
        std::vector<int> sel;
        double minrho = 1e300;
        for (int s = 0; s < np; ++s) {
            if (mask >> s & 1u) {
                sel.push_back(peers[s]);
                minrho = std::min(minrho, rho(peers[s], j, j_count));
            }
        }
        double term = minrho * intersection_size(sel, j, b, profile);
        total += (sel.size() % 2 == 1) ? term : -term;
    }
    return total;
}

// Equivalent evaluation: decompose the min weights over thresholds z and use
// 1 - prod(1 - a_l) per packet for the active peer set, which collapses the
// subset sum exactly.
double innovative_content_sorted(int j, int b, const channel::LossProfile& profile,
                                 const SelectionProbs& rho, const std::vector<int>& peers) {
    const int m = profile.batch_size;
    const int j_count = profile.batches();
    std::vector<std::pair<double, int>> order;
    order.reserve(peers.size());
    for (int p : peers) order.emplace_back(rho(p, j, j_count), p);
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b2) { return a.first > b2.first; });
    double total = 0;
    for (int n = j * m; n < (j + 1) * m; ++n) {
        double pb = profile.loss(b, n);
        if (pb <= 0) continue;
        double prod = 1.0;
        double acc = 0;
        for (size_t s = 0; s < order.size(); ++s) {
            prod *= profile.loss(order[s].second, n); // prod of (1 - (1-P))
            double z_next = s + 1 < order.size() ? order[s + 1].first : 0.0;
            double width = order[s].first - z_next;
            if (width > 0) acc += width * (1.0 - prod);
        }
        total += pb * acc;
    }
    return total;
}

} // namespace

double innovative_content(int j, int b, const channel::LossProfile& profile,
                          const SelectionProbs& rho, bool exact_enum) {
    std::vector<int> peers;
    for (int i = 0; i < profile.k; ++i)
        if (i != b) peers.push_back(i);
    if (peers.empty()) return 0.0;
    double v = exact_enum ? innovative_content_enum(j, b, profile, rho, peers)
                          : innovative_content_sorted(j, b, profile, rho, peers);
    return std::max(0.0, v);
}

int pick_bottleneck(const channel::LossProfile& profile) {
    int best = 0;
    double best_k = -1;
    for (int i = 0; i < profile.k; ++i) {
        double ki = phase1::expected_individual(profile, i).total;
        if (best_k < 0 || ki < best_k - 1e-12) {
            best = i;
            best_k = ki;
        }
    }
    return best;
}

RankEstimate cutoff_and_ranks(int b, const channel::LossProfile& profile, double delta_packets) {
    const int j_count = profile.batches();
    const int m = profile.batch_size;
    RankEstimate est;
    est.bottleneck = b;

    auto kb = phase1::expected_individual(profile, b);
    auto rho = batch_selection_prob(profile, profile.k);
    std::vector<double> content(j_count);
    double content_sum = 0;
    for (int j = 0; j < j_count; ++j) {
        content[j] = innovative_content(j, b, profile, rho);
        content_sum += content[j];
    }
    if (delta_packets <= 0) {
        est.cutoff = 0;
    } else {
        if (content_sum <= 0)
            throw NoProgress("peers cannot contribute innovative packets");
        est.cutoff = (long)std::ceil(delta_packets / content_sum);
    }

    est.p_e.resize(j_count);
    for (int j = 0; j < j_count; ++j) {
        double v = (kb.per_batch[j] + est.cutoff * content[j]) / m;
        if (v > 1.0) {
            v = 1.0;
            ++est.clamped_batches;
        }
        est.p_e[j] = v;
    }

    // mixture of binomial(M, p_e[j]) CDFs over batches
    est.pmf.assign(m + 1, 0.0);
    for (int j = 0; j < j_count; ++j) {
        double p = est.p_e[j];
        double q = 1.0 - p;
        // binomial pmf by recurrence
        double pr = std::pow(q, m);
        for (int v = 0; v <= m; ++v) {
            est.pmf[v] += pr;
            if (v < m) {
                if (q <= 0) {
                    pr = (v + 1 == m) ? 1.0 : 0.0;
                } else {
                    pr = pr * (double)(m - v) / (v + 1) * (p / q);
                }
            }
        }
    }
    for (auto& v : est.pmf) v /= j_count;
    est.cdf.resize(m + 1);
    double run = 0;
    for (int v = 0; v <= m; ++v) {
        run += est.pmf[v];
        est.cdf[v] = run;
    }
    // guard against drift from the recurrences
    double scale = est.cdf[m];
    if (scale > 0)
        for (int v = 0; v <= m; ++v) {
            est.cdf[v] /= scale;
            est.pmf[v] /= scale;
        }
    return est;
}

RankEstimate estimate_bottleneck_ranks(const channel::LossProfile& profile, long f) {
    int b = pick_bottleneck(profile);
    double kb = phase1::expected_individual(profile, b).total;
    return cutoff_and_ranks(b, profile, (double)f - kb);
}

} // namespace batsv2x::analysis
