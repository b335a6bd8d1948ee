#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

namespace bgamma {

/// Seeded 64-bit Mersenne Twister with the uniform and normal draws used by
/// the samplers. Streams are reproducible bit for bit across platforms
/// because only the raw engine output is consumed.
class RngState {
  public:
    explicit RngState(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on the open interval (0, 1), 53 random bits.
    double uniform() {
        for (;;) {
            const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    /// Standard normal by the Marsaglia polar method.
    double normal() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        for (;;) {
            const double a = 2.0 * uniform() - 1.0;
            const double b = 2.0 * uniform() - 1.0;
            const double r = a * a + b * b;
            if (r >= 1.0 || r == 0.0) continue;
            const double f = std::sqrt(-2.0 * std::log(r) / r);
            spare_ = b * f;
            return a * f;
        }
    }

    std::uint64_t next_u64() { return engine_(); }

  private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace bgamma
