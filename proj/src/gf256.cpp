#include "batsv2x/gf256.hpp"

#include <array>
#include <mutex>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define BATSV2X_X86 1
#endif

namespace batsv2x::gf {

namespace {

struct Tables {
    std::array<uint8_t, 256> logt{};
    std::array<uint8_t, 512> expt{}; // doubled to skip the mod-255 in mul
    // mul_nibble[s][0..15]  = s * x        (low nibble)
    // mul_nibble[s][16..31] = s * (x << 4) (high nibble)
    alignas(32) uint8_t nib[256][32];
};

uint8_t slow_mul(uint8_t a, uint8_t b) {
    uint8_t p = 0;
    while (b) {
        if (b & 1) p ^= a;
        uint8_t hi = a & 0x80;
        a <<= 1;
        if (hi) a ^= 0x1b; // x^8 = x^4+x^3+x+1 under 0x11b
        b >>= 1;
    }
    return p;
}

Tables* build() {
    static Tables t;
    // 0x03 generates the multiplicative group under 0x11b
    uint8_t x = 1;
    for (int i = 0; i < 255; ++i) {
        t.expt[i] = x;
        t.logt[x] = (uint8_t)i;
        x = slow_mul(x, 0x03);
    }
    for (int i = 255; i < 512; ++i) t.expt[i] = t.expt[i - 255];
    for (int s = 0; s < 256; ++s)
        for (int v = 0; v < 16; ++v) {
            t.nib[s][v] = slow_mul((uint8_t)s, (uint8_t)v);
            t.nib[s][16 + v] = slow_mul((uint8_t)s, (uint8_t)(v << 4));
        }
    return &t;
}

const Tables& tables() {
    static Tables* t = build();
    return *t;
}

#if BATSV2X_X86
__attribute__((target("avx2")))
void muladd_avx2(uint8_t* dst, const uint8_t* src, uint8_t s, size_t n) {
    const Tables& t = tables();
    const __m256i lo_tab = _mm256_broadcastsi128_si256(
        _mm_load_si128((const __m128i*)&t.nib[s][0]));
    const __m256i hi_tab = _mm256_broadcastsi128_si256(
        _mm_load_si128((const __m128i*)&t.nib[s][16]));
    const __m256i mask = _mm256_set1_epi8(0x0f);
    size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i v = _mm256_loadu_si256((const __m256i*)(src + i));
        __m256i lo = _mm256_and_si256(v, mask);
        __m256i hi = _mm256_and_si256(_mm256_srli_epi64(v, 4), mask);
        __m256i prod = _mm256_xor_si256(_mm256_shuffle_epi8(lo_tab, lo),
                                        _mm256_shuffle_epi8(hi_tab, hi));
        __m256i d = _mm256_loadu_si256((const __m256i*)(dst + i));
        _mm256_storeu_si256((__m256i*)(dst + i), _mm256_xor_si256(d, prod));
    }
    const uint8_t* nl = t.nib[s];
    for (; i < n; ++i) dst[i] ^= (uint8_t)(nl[src[i] & 0x0f] ^ nl[16 + (src[i] >> 4)]);
}

bool have_avx2() {
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok;
}
#endif

} // namespace

void init_tables() { (void)tables(); }

uint8_t mul(uint8_t a, uint8_t b) {
    if (a == 0 || b == 0) return 0;
    const Tables& t = tables();
    return t.expt[(unsigned)t.logt[a] + t.logt[b]];
}

uint8_t inv(uint8_t a) {
    const Tables& t = tables();
    return t.expt[255 - t.logt[a]];
}

uint8_t mul_schoolbook(uint8_t a, uint8_t b) { return slow_mul(a, b); }

void muladd_scalar(uint8_t* dst, const uint8_t* src, uint8_t s, size_t n) {
    const Tables& t = tables();
    const uint8_t* nl = t.nib[s];
    for (size_t i = 0; i < n; ++i)
        dst[i] ^= (uint8_t)(nl[src[i] & 0x0f] ^ nl[16 + (src[i] >> 4)]);
}

void muladd(uint8_t* dst, const uint8_t* src, uint8_t s, size_t n) {
    if (s == 0) return;
    if (s == 1) {
        for (size_t i = 0; i < n; ++i) dst[i] ^= src[i];
        return;
    }
#if BATSV2X_X86
    if (have_avx2()) {
        muladd_avx2(dst, src, s, n);
        return;
    }
#endif
    muladd_scalar(dst, src, s, n);
}

void scale(uint8_t* dst, uint8_t s, size_t n) {
    if (s == 1) return;
    if (s == 0) {
        for (size_t i = 0; i < n; ++i) dst[i] = 0;
        return;
    }
    const Tables& t = tables();
    const uint8_t* nl = t.nib[s];
    for (size_t i = 0; i < n; ++i)
        dst[i] = (uint8_t)(nl[dst[i] & 0x0f] ^ nl[16 + (dst[i] >> 4)]);
}

} // namespace batsv2x::gf
