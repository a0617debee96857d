#pragma once
#include <cstdint>
#include <cstddef>
#include <vector>

namespace batsv2x {

// Deterministic, splittable PRNG (xoshiro256** seeded through splitmix64).
// Substreams are derived by hashing (seed, id...) so that trials, vehicles
// and purposes draw from independent streams regardless of thread schedule.
class Rng {
  public:
    explicit Rng(uint64_t seed = 0) { reseed(seed); }

    void reseed(uint64_t seed) {
        uint64_t x = seed;
        for (auto& si : s_) si = splitmix64(x);
    }

    // Derived substream: mixes additional stream identifiers into the seed.
    static Rng substream(uint64_t seed, std::initializer_list<uint64_t> ids) {
        uint64_t x = seed;
        for (uint64_t id : ids) {
            x ^= 0x9e3779b97f4a7c15ULL + id;
            x = splitmix64(x);
        }
        return Rng(x);
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), n >= 1 (Lemire rejection).
    uint64_t below(uint64_t n) {
        uint64_t x = next_u64();
        __uint128_t m = (__uint128_t)x * n;
        uint64_t l = (uint64_t)m;
        if (l < n) {
            uint64_t t = (0 - n) % n;
            while (l < t) {
                x = next_u64();
                m = (__uint128_t)x * n;
                l = (uint64_t)m;
            }
        }
        return (uint64_t)(m >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    uint8_t byte() { return (uint8_t)below(256); }
    uint8_t nonzero_byte() { return (uint8_t)(1 + below(255)); }

    // k distinct values from [0, n), order not specified but deterministic.
    std::vector<uint32_t> sample_without_replacement(uint32_t n, uint32_t k);

  private:
    static uint64_t splitmix64(uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
};

} // namespace batsv2x
