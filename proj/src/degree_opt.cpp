#include "batsv2x/degree_opt.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "batsv2x/simplex.hpp"

namespace batsv2x::codec {

double RankDistribution::mean() const {
    double s = 0;
    for (int r = 0; r < (int)h.size(); ++r) s += r * h[r];
    return s;
}

void RankDistribution::validate() const {
    if (h.empty()) throw ValidationError("rank distribution is empty");
    double sum = 0;
    for (double p : h) {
        if (p < 0) throw ValidationError("rank probabilities must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("rank distribution must sum to 1");
}

int default_max_degree(int m, int f) {
    return std::min<long>(f, std::max<long>(4L * m, std::lround(m * std::log(20.0 * f))));
}

namespace {

// P(a random (s x r) GF(256) matrix has full row rank s)
double full_rank_prob(int s, int r) {
    if (s > r) return 0.0;
    double p = 1.0;
    for (int i = 0; i < s; ++i) p *= 1.0 - std::pow(256.0, -(double)(r - i));
    return p;
}

// Release intensity of degree d at recovery fraction x: d times the
// probability that a batch of rank r can resolve one more of its packets,
// averaged over the rank distribution. The count of still-unknown packets
// among the other d-1 contributors is binomial(d-1, 1-x).
double release_weight(int d, double x, const RankDistribution& h) {
    const int m = h.m();
    const double p = 1.0 - x; // per-contributor probability of being unknown
    // binomial pmf over s = 0..m-1 via logs for numerical safety at large d
    double tot = 0;
    double lp = std::log(std::max(p, 1e-300));
    double lq = std::log(std::max(1.0 - p, 1e-300));
    for (int r = 1; r <= m; ++r) {
        if (h.h[r] <= 0) continue;
        double acc = 0;
        for (int s = 0; s < r && s <= d - 1; ++s) {
            double lpmf;
            if (p >= 1.0)
                lpmf = (s == d - 1) ? 0.0 : -1e30;
            else if (p <= 0.0)
                lpmf = (s == 0) ? 0.0 : -1e30;
            else
                lpmf = std::lgamma(d) - std::lgamma(s + 1) - std::lgamma(d - s) + s * lp +
                       (d - 1 - s) * lq;
            acc += std::exp(lpmf) * full_rank_prob(s + 1, r);
        }
        tot += h.h[r] * acc;
    }
    return d * tot;
}

} // namespace

DegreeOptResult optimize_degree_distribution(const RankDistribution& h, int m, int f,
                                             const DegreeOptOptions& opts) {
    h.validate();
    if (h.m() != m) throw ValidationError("rank distribution length must be M+1");
    double rbar = h.mean();
    if (rbar <= 0) throw InfeasibleLP("rank distribution has all mass at rank 0");

    const int dmax = default_max_degree(m, f);
    std::set<int> support;
    for (int d = 1; d <= std::min(opts.dense_degrees, dmax); ++d) support.insert(d);
    if (dmax > opts.dense_degrees) {
        double lo = std::log((double)opts.dense_degrees);
        double hi = std::log((double)dmax);
        for (int i = 0; i <= opts.geometric_degrees; ++i) {
            int d = (int)std::lround(std::exp(lo + (hi - lo) * i / opts.geometric_degrees));
            support.insert(std::clamp(d, 1, dmax));
        }
    }
    std::vector<int> degs(support.begin(), support.end());
    const int nd = (int)degs.size();

    // progress grid: coarse over [0, 0.9], geometric tail toward 1 - slack/F
    std::set<double> grid;
    for (int i = 1; i <= opts.coarse_grid; ++i) grid.insert(0.9 * i / opts.coarse_grid);
    double slack = opts.end_slack / f;
    for (int i = 0; i < opts.tail_grid; ++i) {
        double gap = slack * std::pow(0.12 / slack, (double)i / (opts.tail_grid - 1));
        grid.insert(1.0 - gap);
    }

    // variables: psi over support degrees, then theta; maximize theta
    Simplex::Mat a;
    Simplex::Vec b;
    double tail_cap = 1.0 - slack / 3.0;
    for (double x : grid) {
        if (x <= 0) continue;
        double ripple = opts.ripple_c * std::sqrt(std::max(0.0, 1.0 - x) * f) / f;
        double tgt = std::min(x + ripple, tail_cap);
        if (tgt <= x) continue;
        Simplex::Vec row(nd + 1, 0.0);
        for (int i = 0; i < nd; ++i) row[i] = -release_weight(degs[i], x, h);
        row[nd] = -std::log(1.0 - tgt);
        a.push_back(std::move(row));
        b.push_back(0.0);
    }
    // sum psi <= 1 and -sum psi <= -1
    {
        Simplex::Vec row(nd + 1, 0.0);
        for (int i = 0; i < nd; ++i) row[i] = 1.0;
        a.push_back(row);
        b.push_back(1.0);
        for (int i = 0; i < nd; ++i) row[i] = -1.0;
        row[nd] = 0.0;
        a.push_back(row);
        b.push_back(-1.0);
    }
    Simplex::Vec c(nd + 1, 0.0);
    c[nd] = 1.0;

    Simplex::Vec x;
    double obj = Simplex(a, b, c).solve(x);
    if (!std::isfinite(obj) || obj <= 1e-9)
        throw InfeasibleLP("degree optimization found no positive decodable rate");

    DegreeOptResult res;
    res.theta = obj;
    res.rank_mean = rbar;
    res.predicted_overhead = rbar / obj - 1.0;
    res.psi.psi.assign(dmax + 1, 0.0);
    double sum = 0;
    for (int i = 0; i < nd; ++i) {
        double v = std::max(0.0, x[i]);
        res.psi.psi[degs[i]] = v;
        sum += v;
    }
    for (auto& v : res.psi.psi) v /= sum;
    res.psi.validate();
    return res;
}

} // namespace batsv2x::codec
