#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "semkg/errors.hpp"

namespace semkg {

// Deterministic 64-bit RNG (xoshiro256**). The standard <random>
// distributions are not bit-identical across library implementations, so
// every draw the toolkit makes goes through this class: identical seeds give
// identical outputs on any platform, which is what makes rerun-byte-identity
// of pipeline outputs possible.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        // splitmix64 seeding, as recommended for the xoshiro family
        uint64_t x = seed;
        for (auto& w : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            w = z ^ (z >> 31);
        }
    }

    uint64_t next_u64() {
        auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        uint64_t result = rotl(state_[1] * 5, 7) * 9;
        uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    uint64_t next_below(uint64_t bound) {
        if (bound == 0) throw ConfigError("next_below: bound must be positive");
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform integer in [lo, hi] inclusive.
    int64_t next_in(int64_t lo, int64_t hi) {
        if (lo > hi) throw ConfigError("next_in: empty range");
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    // Index draw proportional to the given non-negative weights.
    size_t next_weighted(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) throw ConfigError("next_weighted: total weight must be positive");
        double r = next_double() * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (r < acc) return i;
        }
        return weights.size() - 1;  // numeric edge: r == total
    }

    // Fisher-Yates, in place.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (size_t i = items.size(); i > 1; --i) {
            size_t j = next_below(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    uint64_t state_[4];
};

// FNV-1a over bytes; stable across runs and platforms. Used for content
// addressing (replay cache, config hashes) and per-item stream derivation.
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t fnv1a64(const std::string& s, uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), h);
}

// Keeps string literals off the (void*, len) overload.
inline uint64_t fnv1a64(const char* s, uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a64(std::string(s), h);
}

// Independent stream for item `index` of a run seeded with `seed`. Items can
// then be processed in any order (or in parallel) with identical results.
inline Rng rng_for_item(uint64_t seed, uint64_t index) {
    uint64_t buf[2] = {seed, index};
    return Rng(fnv1a64(buf, sizeof buf));
}

}  // namespace semkg
