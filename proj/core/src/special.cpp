#include "zatlas/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "zatlas/error.hpp"

namespace zatlas {
namespace {

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr double kPoleTol = 1e-9;

// Splits x into a quadrant index q (mod 4) and a remainder f with
// x = f + q/2, |f| <= 1/4. Both operations are exact in binary arithmetic.
void quadrant(double x, int& q, double& f) {
  const double r = std::remainder(x, 2.0);
  const double n = std::nearbyint(2.0 * r);
  f = r - 0.5 * n;
  q = static_cast<int>(n) & 3;
}

void check_pole(Complex z) {
  const double d = distance_to_gamma_pole(z);
  if (d < kPoleTol) {
    const long index = -std::lround(z.real());
    throw Error(ErrorCode::AtPole, "gamma pole at -" + std::to_string(index));
  }
}

Complex log_gamma_right(Complex z) {
  z -= 1.0;
  Complex x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const Complex t = z + kLanczosG + 0.5;
  return kLogSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace

double sin_pi(double x) noexcept {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  int q;
  double f;
  quadrant(x, q, f);
  switch (q) {
    case 0: return f == 0.0 ? 0.0 : std::sin(kPi * f);
    case 1: return std::cos(kPi * f);
    case 2: return f == 0.0 ? 0.0 : -std::sin(kPi * f);
    default: return -std::cos(kPi * f);
  }
}

double cos_pi(double x) noexcept {
  if (!std::isfinite(x)) return std::numeric_limits<double>::quiet_NaN();
  int q;
  double f;
  quadrant(x, q, f);
  switch (q) {
    case 0: return std::cos(kPi * f);
    case 1: return f == 0.0 ? 0.0 : -std::sin(kPi * f);
    case 2: return -std::cos(kPi * f);
    default: return f == 0.0 ? 0.0 : std::sin(kPi * f);
  }
}

Complex sin_pi(Complex z) noexcept {
  const double y = kPi * z.imag();
  return {sin_pi(z.real()) * std::cosh(y), cos_pi(z.real()) * std::sinh(y)};
}

Complex cos_pi(Complex z) noexcept {
  const double y = kPi * z.imag();
  return {cos_pi(z.real()) * std::cosh(y), -sin_pi(z.real()) * std::sinh(y)};
}

Complex log_sin_pi(Complex z) {
  if (std::abs(z.imag()) < 20.0) return std::log(sin_pi(z));
  if (z.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
  // sin(w) = (i/2) e^{-iw} (1 - e^{2iw}), w = pi z, Im w > 0.
  const double x = z.real();
  const double y = z.imag();
  const double decay = std::exp(-2.0 * kPi * y);
  const Complex eps = decay * Complex(cos_pi(2.0 * x), sin_pi(2.0 * x));
  const Complex log1m = -eps - 0.5 * eps * eps;
  // Keep the phase reduced so that large x does not lose digits.
  const double phase = kPi * (0.5 - std::remainder(x, 2.0));
  return Complex(kPi * y - kLog2, phase) + log1m;
}

double distance_to_gamma_pole(Complex z) noexcept {
  if (z.real() > 0.5) return std::numeric_limits<double>::infinity();
  const double n = std::nearbyint(z.real());
  return std::abs(z - n);
}

Complex log_gamma(Complex z) {
  check_pole(z);
  if (z.real() >= 0.5) return log_gamma_right(z);
  return kLogPi - log_sin_pi(z) - log_gamma_right(1.0 - z);
}

Complex gamma(Complex z) {
  check_pole(z);
  if (z.real() >= 0.5) return std::exp(log_gamma_right(z));
  if (std::abs(z.imag()) < 20.0) return kPi / (sin_pi(z) * std::exp(log_gamma_right(1.0 - z)));
  return std::exp(log_gamma(z));
}

Complex digamma(Complex z) {
  check_pole(z);
  if (z.real() < 0.5) {
    // psi(z) = psi(1 - z) - pi cot(pi z)
    Complex cot;
    if (std::abs(z.imag()) > 20.0) {
      cot = Complex(0.0, z.imag() > 0.0 ? -1.0 : 1.0);
    } else {
      cot = cos_pi(z) / sin_pi(z);
    }
    return digamma(1.0 - z) - kPi * cot;
  }
  Complex shift = 0.0;
  while (std::abs(z) < 10.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  // B_{2k} / (2k)
  static constexpr std::array<double, 7> kCoeff = {
      1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0, 1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0};
  const Complex inv2 = 1.0 / (z * z);
  Complex pw = inv2;
  Complex series = 0.0;
  for (double c : kCoeff) {
    series += c * pw;
    pw *= inv2;
  }
  return shift + std::log(z) - 0.5 / z - series;
}

}  // namespace zatlas
