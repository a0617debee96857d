#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "batsv2x/gf256.hpp"

namespace batsv2x::gf {

// Dense row-major matrix over GF(2^8).
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a((size_t)r * c, 0) {}

    uint8_t& at(int r, int c) { return a[(size_t)r * cols + c]; }
    uint8_t at(int r, int c) const { return a[(size_t)r * cols + c]; }
    uint8_t* row(int r) { return a.data() + (size_t)r * cols; }
    const uint8_t* row(int r) const { return a.data() + (size_t)r * cols; }
};

int rank(Matrix m); // by value: elimination scratches the copy

struct Rref {
    Matrix m;
    std::vector<int> pivot_cols;
};
Rref row_reduce(Matrix m);

// Incremental row basis in echelon form; backs innovation tests and rank
// bookkeeping inside decoder states.
class RowBasis {
  public:
    explicit RowBasis(int cols = 0) : cols_(cols) {}

    int cols() const { return cols_; }
    int rank() const { return (int)rows_.size(); }

    // True iff v is outside the current row space.
    bool is_innovative(std::span<const uint8_t> v) const;

    // Inserts v if innovative; returns whether the rank grew.
    bool insert(std::span<const uint8_t> v);

  private:
    // Reduces v in place; returns pivot column or -1 if reduced to zero.
    int reduce(std::vector<uint8_t>& v) const;

    int cols_;
    std::vector<std::vector<uint8_t>> rows_; // each normalized, pivot = 1
    std::vector<int> pivots_;
};

} // namespace batsv2x::gf
