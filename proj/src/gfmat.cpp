#include "batsv2x/gfmat.hpp"

#include <algorithm>

namespace batsv2x::gf {

int rank(Matrix m) {
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int p = -1;
        for (int i = r; i < m.rows; ++i)
            if (m.at(i, c) != 0) { p = i; break; }
        if (p < 0) continue;
        if (p != r)
            std::swap_ranges(m.row(p), m.row(p) + m.cols, m.row(r));
        uint8_t iv = inv(m.at(r, c));
        scale(m.row(r), iv, m.cols);
        for (int i = r + 1; i < m.rows; ++i) {
            uint8_t f = m.at(i, c);
            if (f) muladd(m.row(i), m.row(r), f, m.cols);
        }
        ++r;
    }
    return r;
}

Rref row_reduce(Matrix m) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int p = -1;
        for (int i = r; i < m.rows; ++i)
            if (m.at(i, c) != 0) { p = i; break; }
        if (p < 0) continue;
        if (p != r)
            std::swap_ranges(m.row(p), m.row(p) + m.cols, m.row(r));
        scale(m.row(r), inv(m.at(r, c)), m.cols);
        for (int i = 0; i < m.rows; ++i) {
            if (i == r) continue;
            uint8_t f = m.at(i, c);
            if (f) muladd(m.row(i), m.row(r), f, m.cols);
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

int RowBasis::reduce(std::vector<uint8_t>& v) const {
    for (size_t k = 0; k < rows_.size(); ++k) {
        uint8_t f = v[pivots_[k]];
        if (f) muladd(v.data(), rows_[k].data(), f, cols_);
    }
    for (int c = 0; c < cols_; ++c)
        if (v[c]) return c;
    return -1;
}

bool RowBasis::is_innovative(std::span<const uint8_t> v) const {
    std::vector<uint8_t> tmp(v.begin(), v.end());
    return reduce(tmp) >= 0;
}

bool RowBasis::insert(std::span<const uint8_t> v) {
    std::vector<uint8_t> tmp(v.begin(), v.end());
    int p = reduce(tmp);
    if (p < 0) return false;
    scale(tmp.data(), inv(tmp[p]), cols_);
    // back-eliminate so every stored row is zero at all other pivots; this
    // keeps reduce() correct as a single pass in pivot order
    for (size_t k = 0; k < rows_.size(); ++k) {
        uint8_t f = rows_[k][p];
        if (f) muladd(rows_[k].data(), tmp.data(), f, cols_);
    }
    size_t pos = 0;
    while (pos < pivots_.size() && pivots_[pos] < p) ++pos;
    rows_.insert(rows_.begin() + pos, std::move(tmp));
    pivots_.insert(pivots_.begin() + pos, p);
    return true;
}

} // namespace batsv2x::gf
