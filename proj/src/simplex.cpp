#include "batsv2x/simplex.hpp"

#include <cmath>
#include <utility>

namespace batsv2x {

Simplex::Simplex(const Mat& a, const Vec& b, const Vec& c)
    : m_((int)b.size()), n_((int)c.size()), nb_(n_ + 1), bs_(m_), d_(m_ + 2, Vec(n_ + 2)) {
    for (int i = 0; i < m_; ++i)
        for (int j = 0; j < n_; ++j) d_[i][j] = a[i][j];
    for (int i = 0; i < m_; ++i) {
        bs_[i] = n_ + i;
        d_[i][n_] = -1;
        d_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
        nb_[j] = j;
        d_[m_][j] = -c[j];
    }
    nb_[n_] = -1;
    d_[m_ + 1][n_] = 1;
}

void Simplex::pivot(int r, int s) {
    double* a = d_[r].data();
    double iv = 1.0 / a[s];
    for (int i = 0; i < m_ + 2; ++i) {
        if (i != r && std::fabs(d_[i][s]) > kEps) {
            double* b = d_[i].data();
            double iv2 = b[s] * iv;
            for (int j = 0; j < n_ + 2; ++j) b[j] -= a[j] * iv2;
            b[s] = a[s] * iv2;
        }
    }
    for (int j = 0; j < n_ + 2; ++j)
        if (j != s) d_[r][j] *= iv;
    for (int i = 0; i < m_ + 2; ++i)
        if (i != r) d_[i][s] *= -iv;
    d_[r][s] = iv;
    std::swap(bs_[r], nb_[s]);
}

bool Simplex::iterate(int phase) {
    int x = m_ + phase - 1;
    for (;;) {
        int s = -1;
        for (int j = 0; j < n_ + 1; ++j) {
            if (nb_[j] == -phase) continue;
            if (s == -1 || std::make_pair(d_[x][j], nb_[j]) < std::make_pair(d_[x][s], nb_[s]))
                s = j;
        }
        if (d_[x][s] >= -kEps) return true;
        int r = -1;
        for (int i = 0; i < m_; ++i) {
            if (d_[i][s] <= kEps) continue;
            if (r == -1 || std::make_pair(d_[i][n_ + 1] / d_[i][s], bs_[i]) <
                               std::make_pair(d_[r][n_ + 1] / d_[r][s], bs_[r]))
                r = i;
        }
        if (r == -1) return false;
        pivot(r, s);
    }
}

double Simplex::solve(Vec& x) {
    int r = 0;
    for (int i = 1; i < m_; ++i)
        if (d_[i][n_ + 1] < d_[r][n_ + 1]) r = i;
    if (d_[r][n_ + 1] < -kEps) {
        pivot(r, n_);
        if (!iterate(2) || d_[m_ + 1][n_ + 1] < -kEps) return -kInf;
        for (int i = 0; i < m_; ++i) {
            if (bs_[i] == -1) {
                int s = 0;
                for (int j = 1; j <= n_; ++j)
                    if (std::make_pair(d_[i][j], nb_[j]) < std::make_pair(d_[i][s], nb_[s])) s = j;
                pivot(i, s);
            }
        }
    }
    bool ok = iterate(1);
    x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
        if (bs_[i] < n_) x[bs_[i]] = d_[i][n_ + 1];
    return ok ? d_[m_][n_ + 1] : kInf;
}

} // namespace batsv2x
