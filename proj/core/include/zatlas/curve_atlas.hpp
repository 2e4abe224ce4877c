#pragma once

// Predictor-corrector continuation of level sets of zeta:
//
//   * pre-images of the real axis, split by class into curves whose image lies
//     below 1 (Gamma) or above 1 (Gamma'),
//   * pre-images of circles |z| = r.
//
// A curve is a polyline of samples (s, zeta(s)); every sample satisfies the
// level condition to `corrector_tol`. Real-axis pre-images are cut at points
// where zeta(s) = 1 so that each traced curve keeps a single class.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zatlas/zeta_eval.hpp"

namespace zatlas {

/// Axis-aligned rectangle in the s-plane.
struct Rect {
  double sigma_min = -1.0;
  double sigma_max = 10.0;
  double t_min = 0.1;
  double t_max = 60.0;

  bool contains(Complex s) const noexcept {
    return s.real() >= sigma_min && s.real() <= sigma_max && s.imag() >= t_min && s.imag() <= t_max;
  }
  bool valid() const noexcept { return sigma_min < sigma_max && t_min < t_max; }
};

enum class CurveTag { PreimageBelowOne, PreimageAboveOne, CirclePreimage };

std::string_view to_string(CurveTag tag) noexcept;

class CurveKind {
 public:
  static CurveKind below_one() { return CurveKind(CurveTag::PreimageBelowOne, 0.0); }
  static CurveKind above_one() { return CurveKind(CurveTag::PreimageAboveOne, 0.0); }
  /// Throws Error{InvalidConfig} unless r > 0.
  static CurveKind circle(double r);

  CurveTag tag() const noexcept { return tag_; }
  /// Present iff tag() == CirclePreimage.
  std::optional<double> radius() const noexcept {
    return tag_ == CurveTag::CirclePreimage ? std::optional<double>(radius_) : std::nullopt;
  }
  bool real_axis() const noexcept { return tag_ != CurveTag::CirclePreimage; }

  friend bool operator==(const CurveKind&, const CurveKind&) = default;

 private:
  CurveKind(CurveTag tag, double r) : tag_(tag), radius_(r) {}
  CurveTag tag_;
  double radius_;
};

/// How a traced curve terminates at one of its ends.
enum class EndKind {
  EscapesRight,   // left the box through sigma = sigma_max
  EscapesDomain,  // left the box through another edge, or stopped at the pole
  ClosedLoop,
  OnePoint,       // reached zeta(s) = 1 where the real-axis pre-image changes class
  SampleLimit,    // max_samples exhausted
};

std::string_view to_string(EndKind e) noexcept;

struct CurveSample {
  Complex s;
  Complex z;
};

struct TraceConfig {
  double max_step = 0.05;
  double min_step = 1e-4;
  double corrector_tol = 1e-10;
  Rect domain_box;
  int max_samples = 20000;
  EvalConfig eval;

  void validate() const;
};

struct TracedCurve {
  int id = -1;
  CurveKind kind = CurveKind::below_one();
  /// Gamma: Re zeta decreasing along samples. Gamma': increasing.
  /// Circle pre-images: arg zeta increasing.
  std::vector<CurveSample> samples;
  std::optional<int> strip_index;
  std::optional<int> component_index;
  /// ends[0] belongs to samples.front(), ends[1] to samples.back().
  std::array<EndKind, 2> ends{EndKind::EscapesDomain, EndKind::EscapesDomain};
  /// Location of zeta(s) = 1 for ends of kind OnePoint.
  std::array<std::optional<Complex>, 2> terminals;

  bool closed() const noexcept { return ends[0] == EndKind::ClosedLoop; }
  bool escapes_right() const noexcept {
    return ends[0] == EndKind::EscapesRight || ends[1] == EndKind::EscapesRight;
  }
};

struct Seed {
  Complex s;
  CurveKind kind = CurveKind::below_one();
};

/// Sign changes of Im zeta along the four box edges, refined by bisection to
/// |Im zeta| < corrector_tol and classified by Re zeta against 1. Sorted by
/// edge (right, top, left, bottom) and position along it.
std::vector<Seed> seed_real_axis_preimages(const Rect& box, const TraceConfig& cfg);

/// Continues the real-axis pre-image through `seed` in both directions.
/// Throws Error{SeedInvalid} or Error{BranchPointEncountered}.
TracedCurve trace_level_curve(Complex seed, CurveKind kind, const TraceConfig& cfg);

/// Continues the component of {|zeta| = r} through `seed`.
TracedCurve trace_circle_preimage(double r, Complex seed, const TraceConfig& cfg);

/// Minimum distance between the two polylines (segment to segment).
double curve_min_distance(const TracedCurve& a, const TracedCurve& b);

/// Distance from a point to a curve's polyline.
double point_curve_distance(Complex p, const TracedCurve& c);

/// Symmetric Hausdorff distance between sample sets measured against the
/// other polyline.
double hausdorff_distance(const TracedCurve& a, const TracedCurve& b);

/// Unsigned angle between the tangents of two Gamma' curves at the points
/// where Re zeta = z_param. Throws Error{ParamNotAttained}.
double tangent_angle_between(const TracedCurve& a, const TracedCurve& b, double z_param);

/// Point on a real-axis pre-image where Re zeta = value, interpolated linearly
/// in arclength between bracketing samples, with the chord direction there.
struct CurvePoint {
  Complex s;
  Complex tangent;
};
std::optional<CurvePoint> point_at_value(const TracedCurve& c, double value);

/// Re zeta at the first place where the curve crosses sigma = sigma_probe.
std::optional<double> value_at_sigma(const TracedCurve& c, double sigma_probe);

/// Smallest circle-pre-image radius at which the components around two zeros
/// meet. `touch_point` is a zero of zeta' found by Newton from the closest
/// approach just below r0.
struct TouchResult {
  bool touches = false;  // false: the components stay disjoint for r <= 1 - 1e-6
  double r0 = 1.0;
  std::optional<Complex> touch_point;
  double touch_abs_zeta_prime = 0.0;
};
TouchResult find_touch_radius(Complex zero_a, Complex zero_b, const TraceConfig& cfg);

/// Traced curves of one scan box plus anything that prevented a trace.
struct TraceEvent {
  Complex seed;
  std::string message;
};

struct Atlas {
  Rect box;
  std::vector<TracedCurve> curves;  // curves[i].id == i
  std::vector<TraceEvent> events;

  const TracedCurve& curve(int id) const { return curves.at(static_cast<std::size_t>(id)); }
};

/// Seeds the box edges, traces every distinct real-axis pre-image and sorts
/// the result by (kind, first-sample t, first-sample sigma).
Atlas build_atlas(const TraceConfig& cfg);

/// Adds the real-axis pre-image through each point unless an existing curve
/// of the same class already passes within max_step. Re-sorts and re-numbers.
void reseed_atlas(Atlas& atlas, std::span<const Complex> points, const TraceConfig& cfg);

/// Re-traces a curve inside a box widened to sigma_max = new_sigma_max.
TracedCurve extend_right(const TracedCurve& c, double new_sigma_max, const TraceConfig& cfg);

/// Conjugate image of a curve (region below the real axis).
TracedCurve mirror(const TracedCurve& c);

}  // namespace zatlas
