#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "blsd/vec.hpp"

namespace blsd {

/// Seeded random source. The engine is mt19937_64 (bit-exact by the
/// standard); the value mappings are done by hand because the library
/// distributions are implementation-defined and would break trace
/// reproducibility across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// uniform in [0, 1) with 53 random bits
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// standard normal via Box-Muller (cosine branch only)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// uniform integer in [lo, hi], multiply-shift bounded mapping
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const auto wide = static_cast<unsigned __int128>(engine_()) * span;
        return lo + static_cast<int>(wide >> 64);
    }

    Vector normal_vector(std::size_t n, double scale = 1.0) {
        Vector v(n);
        for (double& x : v) x = scale * normal();
        return v;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace blsd
