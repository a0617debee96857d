#pragma once
#include <cstdint>
#include <cstddef>
#include <span>

namespace batsv2x::gf {

// GF(2^8) with reduction polynomial x^8+x^4+x^3+x+1 (0x11b).
// Multiplication goes through log/antilog tables built once at startup and
// verified against the shift-and-add product in the test suite.

void init_tables(); // idempotent, called lazily by the accessors below

uint8_t mul(uint8_t a, uint8_t b);
uint8_t inv(uint8_t a); // a != 0
inline uint8_t add(uint8_t a, uint8_t b) { return a ^ b; }
inline uint8_t sub(uint8_t a, uint8_t b) { return a ^ b; }

// Reference shift-and-add product, used as the independent check of the tables.
uint8_t mul_schoolbook(uint8_t a, uint8_t b);

// dst ^= s * src  (element-wise over GF(2^8)); AVX2 path when available.
void muladd(uint8_t* dst, const uint8_t* src, uint8_t s, size_t n);
// dst = s * dst
void scale(uint8_t* dst, uint8_t s, size_t n);

// Scalar reference implementation of muladd, for equivalence tests.
void muladd_scalar(uint8_t* dst, const uint8_t* src, uint8_t s, size_t n);

inline void muladd(std::span<uint8_t> dst, std::span<const uint8_t> src, uint8_t s) {
    muladd(dst.data(), src.data(), s, dst.size());
}

} // namespace batsv2x::gf
