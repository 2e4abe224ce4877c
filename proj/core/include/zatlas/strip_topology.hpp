#pragma once

// Strips between consecutive Gamma' curves that escape to the right, with
// their Gamma components, zeros and one-points.

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "zatlas/curve_atlas.hpp"
#include "zatlas/zero_lab.hpp"

namespace zatlas {

struct StripRecord {
  /// 0 for the region below the first bounding Gamma' of the box, then 1, 2, ...
  int j = 0;
  std::optional<int> lower_gamma_prime;
  std::optional<int> upper_gamma_prime;
  /// Missing a bounding curve, or a bounding curve that does not run from the
  /// right edge to the left edge. Excluded from lemma verdicts.
  bool partial = false;
  /// Gamma curve ids; the principal component comes first when there is one.
  std::vector<int> gamma_components;
  std::optional<int> principal;
  /// Gamma' pieces that are not strip boundaries (continuations past one-points).
  std::vector<int> gamma_prime_pieces;
  int m_type = 0;
  std::vector<std::size_t> zeros;  // indices into the zero list
  std::vector<Complex> one_points;
  std::vector<Complex> minus_one_points;
  bool inconsistent = false;
  bool one_points_missing = false;
  /// t of the bounding curves on sigma = 1/2.
  std::optional<double> t_lower;
  std::optional<double> t_upper;
};

/// True iff a downward vertical ray from p crosses the polyline (extended
/// horizontally to the right from its right-escaping end) an odd number of times.
bool above_curve(Complex p, const TracedCurve& c);

bool in_strip(Complex p, const StripRecord& strip, std::span<const TracedCurve> curves);

/// t of the first crossing of sigma = sigma_probe along the samples.
std::optional<double> t_at_sigma(const TracedCurve& c, double sigma_probe);

/// Tail test |zeta - 1| <= 2·2^-sigma on every sample with sigma in [3, box.sigma_max].
bool satisfies_tail_bound(const TracedCurve& c, double sigma_max);

/// Throws Error{OrphanComponent} or Error{AmbiguousPrincipal} (complete strips only).
std::vector<StripRecord> assemble_strips(std::span<const TracedCurve> curves, std::span<const ZeroRecord> zeros,
                                         const Rect& box, const EvalConfig& cfg = {});

/// Number of Gamma components. Throws Error{InconsistentStrip} when it differs
/// from the number of zeros.
int classify_m_type(const StripRecord& strip);

struct OnePoints {
  std::vector<Complex> one_points;        // zeta = 1
  std::vector<Complex> minus_one_points;  // zeta = -1
};
/// One entry per non-principal component, by Newton from its zeta -> 1 end and
/// from its Re zeta = -1 crossing. Throws Error{NotFound}.
OnePoints locate_one_points(const StripRecord& strip, std::span<const TracedCurve> curves,
                            const EvalConfig& cfg = {});

struct Lemma1Report {
  bool pass = false;
  int principal_candidates = 0;
  int other_right_escapes = 0;
  double max_tail_ratio = 0.0;  // max |zeta - 1| / 2^(1-sigma) on the principal tail
};
Lemma1Report verify_lemma1(const StripRecord& strip, std::span<const TracedCurve> curves, double sigma_max);

/// Angles between the tangents of a and b where Re zeta equals its value on a
/// at each probe sigma. Throws Error{ParamNotAttained}.
std::vector<double> lemma2_angles(const TracedCurve& a, const TracedCurve& b, std::span<const double> probe_sigmas);

struct Lemma2Report {
  bool pass = false;
  std::vector<double> angles;
};
/// Extends both bounding curves past the last probe before measuring.
Lemma2Report verify_lemma2(const StripRecord& strip, std::span<const TracedCurve> curves,
                           std::span<const double> probe_sigmas, const TraceConfig& cfg);

struct Census {
  std::map<int, int> histogram;  // m_type -> complete strips
  int sum_m_type = 0;
  int zeros_in_complete = 0;
  int zeros_total = 0;
  int zeros_in_partial = 0;
  std::optional<int> first_multi_j;
  std::optional<std::pair<double, double>> first_multi_t_range;
  bool consistent() const noexcept { return sum_m_type == zeros_in_complete; }
};
Census take_census(std::span<const StripRecord> strips);

}  // namespace zatlas
