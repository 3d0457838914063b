#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace cbl {

/// splitmix64 step; used to derive well-separated seeds from user seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Deterministic combination of two seeds into one stream seed.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a;
    std::uint64_t h = splitmix64(s);
    s ^= b + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    std::uint64_t s = seed;
    return std::mt19937_64(splitmix64(s));
}

/// Uniform integer in [0, n) by rejection sampling. Unlike
/// std::uniform_int_distribution the output sequence is identical on every
/// platform, which the reproducibility guarantees rely on.
inline std::uint64_t bounded_uniform(std::mt19937_64& eng, std::uint64_t n) {
    // 2^64 mod n, computed without 128-bit arithmetic
    const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % n + 1) % n;
    for (;;) {
        const std::uint64_t r = eng();
        if (rem == 0 || r < std::numeric_limits<std::uint64_t>::max() - rem + 1)
            return r % n;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; two engine draws per variate so the
/// stream layout does not depend on call history.
inline double standard_normal(std::mt19937_64& eng) {
    const double u1 = 1.0 - uniform01(eng); // (0, 1]
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

/// Lognormal with mean exactly 1 and the given coefficient of variation.
inline double unit_mean_lognormal(std::mt19937_64& eng, double cv) {
    if (cv <= 0.0) return 1.0;
    const double sigma2 = std::log1p(cv * cv);
    const double sigma = std::sqrt(sigma2);
    return std::exp(standard_normal(eng) * sigma - 0.5 * sigma2);
}

} // namespace cbl
