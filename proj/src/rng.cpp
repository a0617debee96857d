#include "batsv2x/rng.hpp"

#include <unordered_set>

namespace batsv2x {

std::vector<uint32_t> Rng::sample_without_replacement(uint32_t n, uint32_t k) {
    std::vector<uint32_t> out;
    out.reserve(k);
    if (k >= n) {
        for (uint32_t i = 0; i < n; ++i) out.push_back(i);
        return out;
    }
    if ((uint64_t)k * 3 >= n) {
        // partial Fisher-Yates over an index array
        std::vector<uint32_t> idx(n);
        for (uint32_t i = 0; i < n; ++i) idx[i] = i;
        for (uint32_t i = 0; i < k; ++i) {
            uint32_t j = i + (uint32_t)below(n - i);
            std::swap(idx[i], idx[j]);
            out.push_back(idx[i]);
        }
        return out;
    }
    std::unordered_set<uint32_t> seen;
    seen.reserve(k * 2);
    while (out.size() < k) {
        uint32_t v = (uint32_t)below(n);
        if (seen.insert(v).second) out.push_back(v);
    }
    return out;
}

} // namespace batsv2x
