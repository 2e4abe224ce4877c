#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "reference_values.hpp"
#include "zatlas/curve_atlas.hpp"
#include "zatlas/error.hpp"

using zatlas::Complex;
using zatlas::CurveKind;
using zatlas::CurveTag;
using zatlas::ErrorCode;
using zatlas::TracedCurve;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const zatlas::Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::ParseError;
}

std::pair<Complex, Complex> zeta_and_prime(Complex s) {
  const auto p = zatlas::eval_zeta_pair(s);
  return {p.value, p.deriv};
}

bool level_ok(const TracedCurve& c, double tol) {
  for (const auto& smp : c.samples) {
    const double res = c.kind.real_axis() ? std::abs(smp.z.imag()) : std::abs(std::abs(smp.z) - *c.kind.radius());
    if (!(res < tol)) return false;
  }
  return true;
}

// Sign changes of Im zeta along the box boundary at a fixed step.
int dense_edge_sign_changes(const zatlas::Rect& b, double h) {
  const Complex corners[5] = {{b.sigma_max, b.t_min}, {b.sigma_max, b.t_max}, {b.sigma_min, b.t_max},
                              {b.sigma_min, b.t_min}, {b.sigma_max, b.t_min}};
  int changes = 0;
  for (int e = 0; e < 4; ++e) {
    const Complex d = corners[e + 1] - corners[e];
    const int n = static_cast<int>(std::ceil(std::abs(d) / h));
    double prev = zatlas::eval_zeta(corners[e]).value.imag();
    for (int i = 1; i <= n; ++i) {
      const double cur = zatlas::eval_zeta(corners[e] + d * (static_cast<double>(i) / n)).value.imag();
      if ((prev < 0) != (cur < 0)) ++changes;
      prev = cur;
    }
  }
  return changes;
}

// Point right of a simple zero where |zeta| = r, by bisection along the ray.
Complex circle_seed(Complex zero, double r) {
  double lo = 0.0, hi = 4.0 * r / std::abs(zatlas::eval_zeta_prime(zero).value);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::abs(zatlas::eval_zeta(zero + mid).value) < r) lo = mid; else hi = mid;
  }
  return zero + 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("curve kind") {
  CHECK(CurveKind::below_one().radius() == std::nullopt);
  CHECK(CurveKind::circle(0.5).radius() == 0.5);
  CHECK(CurveKind::circle(0.5).tag() == CurveTag::CirclePreimage);
  CHECK(code_of([] { CurveKind::circle(0.0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("seeds on the right edge satisfy the tail bound") {
  zatlas::TraceConfig cfg;
  cfg.domain_box = {2.0, 10.0, 0.1, 50.0};
  const auto seeds = zatlas::seed_real_axis_preimages(cfg.domain_box, cfg);
  int on_right = 0;
  for (const auto& sd : seeds) {
    if (sd.s.real() != 10.0) continue;
    ++on_right;
    CHECK(std::abs(zatlas::eval_zeta(sd.s).value - 1.0) < 2.0 * std::pow(2.0, -10.0));
    const double re = zatlas::eval_zeta(sd.s).value.real();
    CHECK(sd.kind == (re > 1.0 ? CurveKind::above_one() : CurveKind::below_one()));
  }
  CHECK(on_right > 0);
}

TEST_CASE("the real axis is a Gamma' seed") {
  zatlas::TraceConfig cfg;
  cfg.domain_box = {2.0, 10.0, -1.0, 1.0};
  const auto seeds = zatlas::seed_real_axis_preimages(cfg.domain_box, cfg);
  const bool found = std::any_of(seeds.begin(), seeds.end(), [](const zatlas::Seed& sd) {
    return std::abs(sd.s.imag()) < 1e-9 && sd.kind == CurveKind::above_one();
  });
  CHECK(found);
}

TEST_CASE("seed count against dense sampling of the edges") {
  zatlas::TraceConfig cfg;
  cfg.domain_box = {-1.0, 6.0, 10.0, 30.0};
  const auto seeds = zatlas::seed_real_axis_preimages(cfg.domain_box, cfg);
  CHECK(static_cast<int>(seeds.size()) == dense_edge_sign_changes(cfg.domain_box, 1e-3));
}

TEST_CASE("tracing the real axis") {
  zatlas::TraceConfig cfg;
  cfg.domain_box = {2.0, 10.0, -1.0, 1.0};
  const auto c = zatlas::trace_level_curve({3.0, 0.0}, CurveKind::above_one(), cfg);
  double max_im = 0.0;
  for (const auto& smp : c.samples) max_im = std::max(max_im, std::abs(smp.s.imag()));
  CHECK(max_im < 1e-9);
  // Re zeta grows toward the pole, so the samples run from sigma = 10 to 2.
  CHECK(c.samples.front().s.real() == doctest::Approx(10.0));
  CHECK(c.samples.back().s.real() == doctest::Approx(2.0));
  for (std::size_t i = 1; i < c.samples.size(); ++i) CHECK(c.samples[i].z.real() > c.samples[i - 1].z.real());

  CHECK(zatlas::tangent_angle_between(c, c, 1.1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("branch point on the real axis") {
  zatlas::TraceConfig cfg;
  cfg.domain_box = {-4.0, -1.0, -1.0, 1.0};
  CHECK(code_of([&] { zatlas::trace_level_curve({-2.5, 0.0}, CurveKind::below_one(), cfg); }) ==
        ErrorCode::BranchPointEncountered);
}

TEST_CASE("seed off the level set") {
  CHECK(code_of([] { zatlas::trace_level_curve({0.5, 20.0}, CurveKind::below_one(), fixture::trace60()); }) ==
        ErrorCode::SeedInvalid);
}

TEST_CASE("the Gamma through sigma = 9 reaches the first zero") {
  const auto& scan = fixture::scan60();
  const Complex rho(0.5, ref::kZeroOrdinates[0]);
  const auto& z0 = scan.zeros.front();
  REQUIRE(z0.owning_curve);
  const auto& owner = scan.atlas.curve(*z0.owning_curve);
  const auto at9 = zatlas::t_at_sigma(owner, 9.0);
  REQUIRE(at9);
  const Complex seed = fixture::project_real_level(Complex(9.0, *at9), zeta_and_prime);
  const auto c = zatlas::trace_level_curve(seed, CurveKind::below_one(), fixture::trace60());

  // Walk to the sign change of Re zeta and bisect on the level set.
  std::size_t k = 1;
  while (k < c.samples.size() && (c.samples[k - 1].z.real() < 0) == (c.samples[k].z.real() < 0)) ++k;
  REQUIRE(k < c.samples.size());
  Complex lo = c.samples[k - 1].s, hi = c.samples[k].s;
  const bool lo_neg = c.samples[k - 1].z.real() < 0;
  Complex mid;
  for (int i = 0; i < 60; ++i) {
    mid = fixture::project_real_level(0.5 * (lo + hi), zeta_and_prime);
    if ((zatlas::eval_zeta(mid).value.real() < 0) == lo_neg) lo = mid; else hi = mid;
  }
  CHECK(std::abs(mid - rho) < 1e-6);
  CHECK(std::abs(zatlas::eval_zeta(mid).value) < 1e-8);
}

TEST_CASE("atlas invariants") {
  const auto& scan = fixture::scan60();
  const auto& cfg = fixture::trace60();
  REQUIRE(scan.atlas.events.empty());
  for (const auto& c : scan.atlas.curves) {
    CAPTURE(c.id);
    CHECK(level_ok(c, cfg.corrector_tol));
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
      const double re = c.samples[i].z.real();
      if (c.kind == CurveKind::below_one()) CHECK(re < 1.0);
      if (c.kind == CurveKind::above_one()) CHECK(re > 1.0);
      if (i > 0) CHECK(std::abs(c.samples[i].s - c.samples[i - 1].s) < 2.0 * cfg.max_step);
    }
  }
}

TEST_CASE("retracing from an interior sample") {
  const auto& scan = fixture::scan60();
  const auto& cfg = fixture::trace60();
  for (const auto& c : scan.atlas.curves) {
    if (c.samples.size() < 8) continue;
    const auto mid = c.samples[c.samples.size() / 2].s;
    const auto again = zatlas::trace_level_curve(mid, c.kind, cfg);
    CAPTURE(c.id);
    CHECK(zatlas::hausdorff_distance(c, again) < 2.0 * cfg.max_step);
  }
}

TEST_CASE("curve distances") {
  const auto& scan = fixture::scan60();
  const auto& cfg = fixture::trace60();
  const auto& curves = scan.atlas.curves;
  CHECK(zatlas::curve_min_distance(curves[0], curves[0]) == 0.0);

  // Consecutive strip boundaries above t = 10.
  for (const auto& s : scan.strips) {
    if (!s.lower_gamma_prime || !s.upper_gamma_prime) continue;
    const auto& a = curves[static_cast<std::size_t>(*s.lower_gamma_prime)];
    const auto& b = curves[static_cast<std::size_t>(*s.upper_gamma_prime)];
    if (!s.t_lower || *s.t_lower < 10.0) continue;
    CAPTURE(s.j);
    CHECK(zatlas::curve_min_distance(a, b) > 10.0 * cfg.max_step);
  }

  // Gamma against Gamma', confirmed on an atlas traced at half the step.
  zatlas::TraceConfig fine = cfg;
  fine.max_step = 0.5 * cfg.max_step;
  const auto dense = zatlas::build_atlas(fine);
  for (const auto* atlas : {&scan.atlas, &dense}) {
    double best = 1e300;
    for (const auto& a : atlas->curves) {
      for (const auto& b : atlas->curves) {
        if (a.kind != CurveKind::below_one() || b.kind != CurveKind::above_one()) continue;
        if (zatlas::share_one_point(a, b)) continue;
        best = std::min(best, zatlas::curve_min_distance(a, b));
      }
    }
    CHECK(best > 1e3 * cfg.corrector_tol);
  }
}

TEST_CASE("rightward escape") {
  const auto& scan = fixture::scan60();
  for (const auto& s : scan.strips) {
    for (const auto id : {s.lower_gamma_prime, s.upper_gamma_prime, s.principal}) {
      if (!id) continue;
      const auto& c = scan.atlas.curve(*id);
      CAPTURE(c.id);
      CHECK(c.escapes_right());
      CHECK(zatlas::satisfies_tail_bound(c, scan.atlas.box.sigma_max));
    }
  }
}

TEST_CASE("conjugate atlas") {
  const auto& scan = fixture::scan60();
  zatlas::TraceConfig cfg = fixture::trace60();
  cfg.domain_box = {-1.0, 10.0, -60.0, -0.1};
  const auto below = zatlas::build_atlas(cfg);
  const auto mirrored = zatlas::mirror_curves(scan.atlas.curves);
  REQUIRE(below.curves.size() == mirrored.size());
  for (const auto& c : below.curves) {
    double best = 1e300;
    for (const auto& m : mirrored) {
      if (m.kind == c.kind) best = std::min(best, zatlas::hausdorff_distance(c, m));
    }
    CHECK(best < 2.0 * cfg.max_step);
  }
}

TEST_CASE("circle pre-images") {
  const auto& scan = fixture::scan60();
  const auto& cfg = fixture::trace60();
  const Complex rho = scan.zeros.front().s();
  const double d = std::abs(zatlas::eval_zeta_prime(rho).value);

  SUBCASE("small loop around a simple zero") {
    const auto c = zatlas::trace_circle_preimage(0.05, circle_seed(rho, 0.05), cfg);
    CHECK(c.closed());
    double diam = 0.0;
    for (const auto& a : c.samples)
      for (const auto& b : c.samples) diam = std::max(diam, std::abs(a.s - b.s));
    // |zeta'(rho)| = 0.79, so the loop is close to a disc of radius 0.05 / 0.79.
    CHECK(diam == doctest::Approx(0.1 / d).epsilon(0.02));
    CHECK(level_ok(c, cfg.corrector_tol));
  }

  SUBCASE("C(1) meets a non-principal component at zeta = -1 and zeta = 1") {
    const auto it = std::find_if(scan.strips.begin(), scan.strips.end(),
                                 [](const auto& s) { return !s.partial && s.m_type == 2; });
    REQUIRE(it != scan.strips.end());
    REQUIRE(it->minus_one_points.size() == 1);
    const auto c = zatlas::trace_circle_preimage(1.0, it->minus_one_points[0], cfg);
    CHECK(zatlas::point_curve_distance(it->one_points[0], c) < cfg.max_step);
    CHECK(level_ok(c, cfg.corrector_tol));
  }

  SUBCASE("two zeros of one strip, r = 0.5") {
    const auto it = std::find_if(scan.strips.begin(), scan.strips.end(),
                                 [](const auto& s) { return !s.partial && s.m_type == 2; });
    REQUIRE(it != scan.strips.end());
    const Complex a = scan.zeros[it->zeros[0]].s();
    const Complex b = scan.zeros[it->zeros[1]].s();
    const auto ca = zatlas::trace_circle_preimage(0.5, circle_seed(a, 0.5), cfg);
    const auto cb = zatlas::trace_circle_preimage(0.5, circle_seed(b, 0.5), cfg);
    CHECK(ca.closed());
    CHECK(cb.closed());
    CHECK(zatlas::curve_min_distance(ca, cb) > 0.0);
  }
}

TEST_CASE("touch radius") {
  const auto& scan = fixture::scan60();
  const auto& cfg = fixture::trace60();

  SUBCASE("zeros in different strips never touch") {
    const auto r = zatlas::find_touch_radius(scan.zeros[0].s(), scan.zeros[1].s(), cfg);
    CHECK_FALSE(r.touches);
  }

  SUBCASE("two zeros of one strip touch at a zero of zeta'") {
    const auto it = std::find_if(scan.strips.begin(), scan.strips.end(),
                                 [](const auto& s) { return !s.partial && s.m_type == 2; });
    REQUIRE(it != scan.strips.end());
    const auto r = zatlas::find_touch_radius(scan.zeros[it->zeros[0]].s(), scan.zeros[it->zeros[1]].s(), cfg);
    REQUIRE(r.touches);
    CHECK(r.r0 > 0.0);
    CHECK(r.r0 < 1.0);
    REQUIRE(r.touch_point);
    CHECK(r.touch_abs_zeta_prime < 1e-6);
    CHECK(std::abs(zatlas::eval_zeta(*r.touch_point).value) == doctest::Approx(r.r0).epsilon(1e-4));
  }
}
