#pragma once

// Riemann zeta evaluation by three independent routes:
//
//   * Euler-Maclaurin summation (default, valid for any s != 1),
//   * the Laurent expansion about s = 1 in terms of Stieltjes constants,
//   * the functional equation  zeta(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s).
//
// Every evaluator returns a value together with an absolute error estimate;
// `eval_zeta` dispatches between them by region and refuses to return a
// value whose estimate exceeds the configured budget.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "zatlas/special.hpp"

namespace zatlas {

struct EvalConfig {
  /// Direct summation terms N. Unset means max(20, ceil(2|t|)).
  std::optional<int> em_terms;
  /// Number of Bernoulli correction terms, 1..kMaxBernoulliOrder.
  int bernoulli_order = 12;
  /// Terms of the Laurent series used near the pole.
  int laurent_terms = 20;
  /// Absolute for |zeta| <= 1, relative above (double rounding alone exceeds
  /// 1e-10 once |zeta| passes ~1e5).
  double target_abs_tol = 1e-10;
  double pole_exclusion_radius = 1e-6;
  /// Evaluate the reflection formula at s = 2, 3, ... by its limit instead of
  /// rejecting those points.
  bool reflection_limit_mode = false;

  /// Throws Error{InvalidConfig} when an invariant is violated.
  void validate() const;
  int em_terms_for(Complex s) const;
  double budget_for(Complex value) const noexcept { return target_abs_tol * std::max(1.0, std::abs(value)); }
};

inline constexpr int kMaxBernoulliOrder = 15;

enum class EvalMethod { EulerMaclaurin, Laurent, Reflection };

std::string_view to_string(EvalMethod m) noexcept;

struct EvalResult {
  Complex value;
  double abs_error_estimate = 0.0;
  EvalMethod method = EvalMethod::EulerMaclaurin;
};

struct StieltjesEntry {
  int n = 0;
  double gamma_n = 0.0;
  double abs_error = 0.0;
};

/// Immutable table of Stieltjes constants gamma_0..gamma_{size-1}.
class StieltjesTable {
 public:
  StieltjesTable() = default;
  /// Throws Error{InvalidConfig} unless indices run 0,1,2,... and every
  /// abs_error is positive.
  explicit StieltjesTable(std::vector<StieltjesEntry> entries);

  std::span<const StieltjesEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  const StieltjesEntry& operator[](std::size_t n) const { return entries_.at(n); }

 private:
  std::vector<StieltjesEntry> entries_;
};

struct StieltjesValue {
  double gamma_n = 0.0;
  double abs_error = 0.0;
};

/// gamma_n from the partial sums  sum_{k<=m} (log k)^n / k - (log m)^{n+1}/(n+1)
/// at cutoffs m, m/2, m/4, tail-corrected and Richardson-extrapolated.
/// Requires n >= 0, m >= 10. Throws Error{NonConvergent}.
StieltjesValue eval_stieltjes(int n, std::int64_t m);

/// Table of gamma_0..gamma_max_n computed in one pass over k <= m.
StieltjesTable build_stieltjes_table(int max_n, std::int64_t m);

/// Shared table used by eval_zeta near the pole (n <= 24, m = 1e5).
const StieltjesTable& default_stieltjes_table();

/// zeta(s) with method dispatch: Laurent for |s-1| < 0.5, reflection for
/// Re s < -0.5, Euler-Maclaurin otherwise.
EvalResult eval_zeta(Complex s, const EvalConfig& cfg = {});

/// zeta'(s), dispatched like eval_zeta.
EvalResult eval_zeta_prime(Complex s, const EvalConfig& cfg = {});

/// zeta(s) and zeta'(s) from one Euler-Maclaurin pass, no dispatch, no
/// budget check. Cheap inner-loop entry point for the tracers.
struct ZetaPair {
  Complex value;
  Complex deriv;
  double value_error = 0.0;
  double deriv_error = 0.0;
};
ZetaPair eval_zeta_em_pair(Complex s, const EvalConfig& cfg = {});

/// zeta and zeta' through the dispatching evaluators.
ZetaPair eval_zeta_pair(Complex s, const EvalConfig& cfg = {});

/// Euler-Maclaurin only, for cross-checks. Checks the pole and the budget.
EvalResult eval_zeta_em(Complex s, const EvalConfig& cfg = {});

/// Truncated Laurent series with `laurent_terms` Stieltjes terms.
/// Throws AtPole at s = 1, InsufficientTable when the table is too short and
/// DomainWarning outside 0 < |s-1| < 1.
EvalResult eval_zeta_laurent(Complex s, const StieltjesTable& table, int laurent_terms);

/// Gamma(s) with a relative error estimate folded into abs_error_estimate.
EvalResult eval_gamma(Complex s);

/// Right-hand side of the functional equation. zeta(1-s) is always taken from
/// the Euler-Maclaurin evaluator so the result is independent of eval_zeta's
/// own reflection branch. The estimate is propagated but not held to the
/// budget: for Re s > 2 the factor multiplying zeta(1-s) exceeds 100.
EvalResult reflection_rhs(Complex s, const EvalConfig& cfg = {});

}  // namespace zatlas
