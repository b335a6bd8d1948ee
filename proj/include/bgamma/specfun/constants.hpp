#pragma once

namespace bgamma::specfun {

/// Euler's constant, 20 significant digits.
inline constexpr double euler_gamma = 0.57721566490153286061;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double ln_pi = 1.14472988584940017414;
inline constexpr double ln_two_pi = 1.83787706640934548356;

}  // namespace bgamma::specfun
