#pragma once

#include <cstdint>
#include <random>

namespace rogue {

/// splitmix64 finalizer, used for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic combination of seed components (query id, seed index, ...).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b,
                              std::uint64_t c = 0) {
    return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

/// Seedable RNG used by all stochastic components.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        return std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
    }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(gen_);
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

}  // namespace rogue
