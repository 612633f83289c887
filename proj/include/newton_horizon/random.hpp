#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "vec3.hpp"

namespace newton_horizon {

/// splitmix64 generator. Hand-rolled so that seeded runs produce identical
/// streams on every platform (std::mt19937 distributions don't promise that).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Uniform direction on the unit sphere.
    Vec3 unit_vector() {
        double z = uniform(-1.0, 1.0);
        double phi = uniform(0.0, 2.0 * std::numbers::pi);
        double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {s * std::cos(phi), s * std::sin(phi), z};
    }

  private:
    std::uint64_t state_;
};

}  // namespace newton_horizon
