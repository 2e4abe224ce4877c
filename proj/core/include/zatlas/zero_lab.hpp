#pragma once

// Non-trivial zeros: location along Gamma curves, counting by the argument
// principle, local order of zeta - zeta(a), and consistency checks on the
// located zeros.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "zatlas/curve_atlas.hpp"

namespace zatlas {

enum class ZeroMethod { CurveBisection, BoxRefinement };

std::string_view to_string(ZeroMethod m) noexcept;

struct ZeroRecord {
  double sigma = 0.5;
  double t = 0.0;
  double residual = 0.0;  // |zeta| at (sigma, t)
  int local_order = 1;
  std::optional<int> owning_curve;
  ZeroMethod method = ZeroMethod::CurveBisection;
  bool anomalous = false;

  Complex s() const noexcept { return {sigma, t}; }
};

struct RectRegion {
  double sigma_lo = 0.0;
  double sigma_hi = 1.0;
  double t_lo = 0.1;
  double t_hi = 60.0;

  bool valid() const noexcept { return sigma_lo < sigma_hi && t_lo < t_hi; }
  bool contains(Complex s) const noexcept {
    return s.real() >= sigma_lo && s.real() <= sigma_hi && s.imag() >= t_lo && s.imag() <= t_hi;
  }
};

struct ZeroSearchConfig {
  EvalConfig eval;
  /// Locate zeros missed by the curves through recursive argument-principle
  /// subdivision before reporting a count mismatch.
  bool box_refinement = true;
  double probe_radius = 1e-3;
};

/// Damped Newton on zeta from `guess`. Returns the refined point and |zeta|.
std::pair<Complex, double> refine_zero(Complex guess, const EvalConfig& cfg = {});

/// Zeros on the Gamma curves of `curves` that lie in `region`, sorted by t.
/// The count is checked against argument_principle_count over the region.
/// Throws Error{CountMismatch}.
std::vector<ZeroRecord> find_zeros(const RectRegion& region, std::span<const TracedCurve> curves,
                                   const ZeroSearchConfig& cfg = {});

/// Zeros minus poles inside `region` from the winding of zeta along its
/// boundary. Horizontal edges are nudged by 1e-3 when a zero sits on them.
/// Throws Error{BoundaryUnsafe} or Error{UnwindFailure}.
int argument_principle_count(const RectRegion& region, const EvalConfig& cfg = {});

struct LocalOrder {
  int k = 1;
  double leading_magnitude = 0.0;
  double radius = 0.0;  // probe radius finally used
};

/// Order of zeta(s) - zeta(a) at a from its winding on circles of radius
/// probe_radius and probe_radius/2, shrinking tenfold on disagreement.
/// Throws Error{Inconclusive}.
LocalOrder local_order(Complex a, double probe_radius = 1e-3, const EvalConfig& cfg = {});

struct DistinctOrdinatesReport {
  bool pass = true;
  std::vector<std::pair<ZeroRecord, ZeroRecord>> offending;
};
DistinctOrdinatesReport check_distinct_ordinates(std::span<const ZeroRecord> zeros, double gap_tol);

/// 0.5 up to t = 110, shrinking like 1/log t beyond.
double default_gap_tol(double t_max) noexcept;

struct CriticalLineReport {
  bool pass = true;
  double max_deviation = 0.0;
  double max_pair_residual = 0.0;  // max |zeta(1 - conj s)|
};
CriticalLineReport check_critical_line(std::span<const ZeroRecord> zeros, double line_tol,
                                       const EvalConfig& cfg = {});

struct BranchReport {
  bool pass = true;
  double min_abs_zeta_prime = 0.0;
  bool monotone = true;
};
/// Requires a PreimageAboveOne curve; throws Error{InvalidConfig} otherwise.
BranchReport check_no_branch_on_gamma_prime(const TracedCurve& curve, const EvalConfig& cfg = {});

}  // namespace zatlas
