// Seeded randomness with a documented splitting scheme. Every command takes
// one --seed; sub-streams derive as splitmix64(seed ^ fnv1a(tag)) so paired
// runs (e.g. with/without preconditions) share base-policy randomness.
// Draw helpers avoid std distributions, whose outputs are not pinned by the
// standard, so identical seeds give identical bytes on any platform.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace precond {

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, const std::string& tag) {
    return splitmix64(seed ^ fnv1a64(tag));
}

class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }

    /// Uniform in [0, n). n must be positive.
    size_t index(size_t n) {
        // Rejection sampling keeps the draw unbiased.
        const uint64_t bound = n;
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return static_cast<size_t>(x % bound);
    }

    /// Uniform in [0, 1).
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return real() < p; }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

    /// Fisher-Yates shuffle, stable across platforms.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Samples an index from unnormalized non-negative weights.
    size_t weighted_index(const std::vector<double>& weights) {
        double total = 0;
        for (double w : weights) total += w;
        double r = real() * total;
        for (size_t i = 0; i < weights.size(); ++i) {
            r -= weights[i];
            if (r < 0) return i;
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace precond
