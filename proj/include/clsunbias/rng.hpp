#ifndef CLSUNBIAS_RNG_HPP_
#define CLSUNBIAS_RNG_HPP_
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace clsunbias {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30U)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27U)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31U);
}

/// seed_i = splitmix64(splitmix64(master) + i)
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(master) + index);
}

/// FNV-1a over a stream name, so named streams get stable ids.
constexpr std::uint64_t stream_id(std::string_view name) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/**
 * Seedable generator with portable draws.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the standard. The
 * distributions are implemented here rather than taken from <random> because the
 * standard distributions are implementation-defined.
 */
class rng {
  public:
    explicit rng(std::uint64_t seed) :
        engine_{ seed } {}

    rng(std::uint64_t seed, std::string_view stream) :
        engine_{ derive_seed(seed, stream_id(stream)) } {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11U) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller. Consumes exactly two uniforms per call.
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform index in [0, n).
    std::uint64_t index(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace clsunbias

#endif  // CLSUNBIAS_RNG_HPP_
