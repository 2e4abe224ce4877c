#pragma once

// Elementary and special functions on the complex plane used by the zeta
// evaluators: exact-at-integers trigonometry, the gamma function (Lanczos),
// its logarithm and the digamma function.

#include <cmath>
#include <complex>

namespace zatlas {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kLogPi = 1.14472988584940017414342735135305871;
inline constexpr double kLog2 = 0.69314718055994530941723212145817657;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640561764;

/// sin(pi x) and cos(pi x) with exact zeros at the integers / half-integers.
double sin_pi(double x) noexcept;
double cos_pi(double x) noexcept;

/// sin(pi z) for complex z, built from the exact real-axis factors above.
Complex sin_pi(Complex z) noexcept;
Complex cos_pi(Complex z) noexcept;

/// A branch of log sin(pi z) that stays finite for large |Im z|.
Complex log_sin_pi(Complex z);

/// Distance from x to the nearest non-positive integer, or +inf when x > 0.5.
double distance_to_gamma_pole(Complex z) noexcept;

/// Gamma(z). Throws Error{AtPole} within 1e-9 of {0, -1, -2, ...}.
Complex gamma(Complex z);

/// A branch of log Gamma(z); exp(log_gamma(z)) == gamma(z). Same poles.
Complex log_gamma(Complex z);

/// psi(z) = Gamma'(z)/Gamma(z). Same poles as gamma.
Complex digamma(Complex z);

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

}  // namespace zatlas
