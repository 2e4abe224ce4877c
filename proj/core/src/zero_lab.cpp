#include "zatlas/zero_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zatlas/error.hpp"

namespace zatlas {
namespace {

constexpr double kBoundaryZero = 1e-6;
// zeta - zeta(a) is of size r^k on a probe circle; only rounding noise is rejected.
constexpr double kCircleFloor = 1e-12;
constexpr double kPoleMargin = 1e-3;
constexpr double kNudge = 1e-3;
constexpr double kMinSegment = 1e-10;
constexpr double kHalfPi = 0.5 * kPi;

struct EdgeFailure {
  ErrorCode code;
  std::string what;
};

// Accumulated change of arg f along a path, refined until every step turns by
// less than pi/2 and |f'/f|·|ds| < 1 at both ends of it.
template <class F>
class ArgWalker {
 public:
  ArgWalker(F f, double floor) : f_(std::move(f)), floor_(floor) {}

  double walk(const std::vector<Complex>& pts) {
    double total = 0.0;
    ZetaPair prev = sample(pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const ZetaPair cur = sample(pts[i]);
      total += refine(pts[i - 1], prev, pts[i], cur);
      prev = cur;
    }
    return total;
  }

 private:
  ZetaPair sample(Complex s) {
    ZetaPair p = f_(s);
    if (std::abs(p.value) < floor_) {
      throw EdgeFailure{ErrorCode::BoundaryUnsafe, "|f| below the boundary floor"};
    }
    return p;
  }

  double refine(Complex s0, const ZetaPair& p0, Complex s1, const ZetaPair& p1) {
    const double h = std::abs(s1 - s0);
    const double d = std::arg(p1.value / p0.value);
    const double guard = std::max(std::abs(p0.deriv / p0.value), std::abs(p1.deriv / p1.value)) * h;
    if (std::abs(d) < kHalfPi && guard < 1.0) return d;
    if (h < kMinSegment) throw EdgeFailure{ErrorCode::UnwindFailure, "arg step >= pi/2 at the minimum step"};
    const Complex sm = 0.5 * (s0 + s1);
    const ZetaPair pm = sample(sm);
    return refine(s0, p0, sm, pm) + refine(sm, pm, s1, p1);
  }

  F f_;
  double floor_;
};

std::vector<Complex> segment_points(Complex a, Complex b, double h) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / h)));
  std::vector<Complex> pts;
  pts.reserve(n + 1);
  for (int i = 0; i <= n; ++i) pts.push_back(a + (b - a) * (static_cast<double>(i) / n));
  return pts;
}

double distance_to_boundary(Complex p, const RectRegion& r) {
  const double x = p.real(), y = p.imag();
  const double dx = std::clamp(x, r.sigma_lo, r.sigma_hi), dy = std::clamp(y, r.t_lo, r.t_hi);
  if (!r.contains(p)) return std::hypot(x - dx, y - dy);
  return std::min({x - r.sigma_lo, r.sigma_hi - x, y - r.t_lo, r.t_hi - y});
}

double edge_winding(Complex a, Complex b, const EvalConfig& cfg) {
  ArgWalker walker([&cfg](Complex s) { return eval_zeta_pair(s, cfg); }, kBoundaryZero);
  return walker.walk(segment_points(a, b, 0.05));
}

std::optional<int> circle_winding(Complex a, Complex za, double r, const EvalConfig& cfg) {
  ArgWalker walker([&](Complex s) {
    ZetaPair p = eval_zeta_pair(s, cfg);
    p.value -= za;
    return p;
  }, kCircleFloor);
  std::vector<Complex> pts;
  constexpr int kStart = 64;
  for (int i = 0; i <= kStart; ++i) pts.push_back(a + std::polar(r, 2.0 * kPi * i / kStart));
  pts.back() = pts.front();
  try {
    const double w = walker.walk(pts) / (2.0 * kPi);
    if (std::abs(w - std::round(w)) >= 0.25) return std::nullopt;
    return static_cast<int>(std::lround(w));
  } catch (const EdgeFailure&) {
    return std::nullopt;
  }
}

bool pole_inside(const RectRegion& r) { return r.contains(Complex(1.0, 0.0)); }

void refine_boxes(const RectRegion& box, const EvalConfig& cfg, int depth, std::vector<Complex>& found) {
  int n = 0;
  try {
    n = argument_principle_count(box, cfg) + (pole_inside(box) ? 1 : 0);
  } catch (const Error&) {
    return;
  }
  if (n <= 0) return;
  if (n == 1) {
    const Complex centre(0.5 * (box.sigma_lo + box.sigma_hi), 0.5 * (box.t_lo + box.t_hi));
    const auto [s, res] = refine_zero(centre, cfg);
    if (res < 1e-8 && box.contains(s)) {
      found.push_back(s);
      return;
    }
  }
  if (depth == 0) return;
  // Off-centre split so that sub-box edges avoid the critical line.
  const double sm = box.sigma_lo + 0.4871 * (box.sigma_hi - box.sigma_lo);
  const double tm = box.t_lo + 0.4871 * (box.t_hi - box.t_lo);
  refine_boxes({box.sigma_lo, sm, box.t_lo, tm}, cfg, depth - 1, found);
  refine_boxes({sm, box.sigma_hi, box.t_lo, tm}, cfg, depth - 1, found);
  refine_boxes({box.sigma_lo, sm, tm, box.t_hi}, cfg, depth - 1, found);
  refine_boxes({sm, box.sigma_hi, tm, box.t_hi}, cfg, depth - 1, found);
}

void dedupe_sorted(std::vector<ZeroRecord>& zs) {
  std::sort(zs.begin(), zs.end(), [](const ZeroRecord& a, const ZeroRecord& b) { return a.t < b.t; });
  std::vector<ZeroRecord> out;
  for (const auto& z : zs) {
    if (!out.empty() && std::abs(out.back().s() - z.s()) < 1e-8) continue;
    out.push_back(z);
  }
  zs = std::move(out);
}

}  // namespace

std::string_view to_string(ZeroMethod m) noexcept {
  return m == ZeroMethod::CurveBisection ? "CurveBisection" : "BoxRefinement";
}

std::pair<Complex, double> refine_zero(Complex guess, const EvalConfig& cfg) {
  Complex s = guess;
  ZetaPair p = eval_zeta_pair(s, cfg);
  for (int it = 0; it < 50; ++it) {
    if (std::abs(p.value) < 1e-12) break;
    const Complex step = p.value / p.deriv;
    double lambda = 1.0;
    Complex next;
    ZetaPair pn;
    while (true) {
      next = s - lambda * step;
      pn = eval_zeta_pair(next, cfg);
      if (std::abs(pn.value) < std::abs(p.value) || lambda < 1e-3) break;
      lambda *= 0.5;
    }
    s = next;
    p = pn;
    if (std::abs(lambda * step) < 1e-14) break;
  }
  return {s, std::abs(p.value)};
}

int argument_principle_count(const RectRegion& region, const EvalConfig& cfg) {
  if (!region.valid()) throw Error(ErrorCode::InvalidConfig, "degenerate region");
  const Complex pole(1.0, 0.0);
  if (distance_to_boundary(pole, region) < kPoleMargin) {
    throw Error(ErrorCode::BoundaryUnsafe, "pole within 1e-3 of the boundary");
  }
  const double nudges[] = {0.0, kNudge, -kNudge};
  double lo_shift = 0.0, hi_shift = 0.0;
  // Bottom and top edges are retried with a shifted ordinate; side edges are not.
  double bottom = 0.0, top = 0.0;
  auto horizontal = [&](double t, bool bottom_edge, double& out_shift) {
    for (std::size_t i = 0; i < std::size(nudges); ++i) {
      const double tt = t + nudges[i];
      try {
        const Complex a(bottom_edge ? region.sigma_lo : region.sigma_hi, tt);
        const Complex b(bottom_edge ? region.sigma_hi : region.sigma_lo, tt);
        const double w = edge_winding(a, b, cfg);
        out_shift = nudges[i];
        return w;
      } catch (const EdgeFailure& f) {
        if (i + 1 == std::size(nudges)) throw Error(f.code, f.what + " (horizontal edge t = " + std::to_string(t) + ")");
      }
    }
    return 0.0;
  };
  bottom = horizontal(region.t_lo, true, lo_shift);
  top = horizontal(region.t_hi, false, hi_shift);
  const double t_lo = region.t_lo + lo_shift, t_hi = region.t_hi + hi_shift;
  if (!(t_lo < t_hi)) throw Error(ErrorCode::BoundaryUnsafe, "nudged region is degenerate");
  double right = 0.0, left = 0.0;
  try {
    right = edge_winding({region.sigma_hi, t_lo}, {region.sigma_hi, t_hi}, cfg);
    left = edge_winding({region.sigma_lo, t_hi}, {region.sigma_lo, t_lo}, cfg);
  } catch (const EdgeFailure& f) {
    throw Error(f.code, f.what + " (vertical edge)");
  }
  const double w = (bottom + right + top + left) / (2.0 * kPi);
  if (std::abs(w - std::round(w)) >= 0.25) {
    throw Error(ErrorCode::UnwindFailure, "winding " + std::to_string(w) + " is not near an integer");
  }
  return static_cast<int>(std::lround(w));
}

LocalOrder local_order(Complex a, double probe_radius, const EvalConfig& cfg) {
  if (!(probe_radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "probe_radius must be > 0");
  const Complex za = eval_zeta_pair(a, cfg).value;
  double r = probe_radius;
  for (int attempt = 0; attempt < 5; ++attempt, r *= 0.1) {
    const auto k1 = circle_winding(a, za, r, cfg);
    const auto k2 = circle_winding(a, za, 0.5 * r, cfg);
    if (!k1 || !k2 || *k1 != *k2 || *k1 < 1) continue;
    const double lead = std::abs(eval_zeta_pair(a + r, cfg).value - za) / std::pow(r, *k1);
    return {*k1, lead, r};
  }
  throw Error(ErrorCode::Inconclusive, "winding disagrees down to radius " + std::to_string(r * 10.0));
}

std::vector<ZeroRecord> find_zeros(const RectRegion& region, std::span<const TracedCurve> curves,
                                   const ZeroSearchConfig& cfg) {
  if (!region.valid()) throw Error(ErrorCode::InvalidConfig, "degenerate region");
  std::vector<ZeroRecord> zs;
  for (const auto& c : curves) {
    if (c.kind.tag() != CurveTag::PreimageBelowOne) continue;
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
      const double a = c.samples[i].z.real(), b = c.samples[i + 1].z.real();
      if (!(a == 0.0 || (a < 0.0) != (b < 0.0))) continue;
      const double f = a == 0.0 ? 0.0 : a / (a - b);
      const Complex guess = c.samples[i].s + f * (c.samples[i + 1].s - c.samples[i].s);
      const auto [s, res] = refine_zero(guess, cfg.eval);
      if (res >= 1e-8 || !region.contains(s) || !(s.real() > 0.0 && s.real() < 1.0)) continue;
      ZeroRecord z;
      z.sigma = s.real();
      z.t = s.imag();
      z.residual = res;
      z.owning_curve = c.id;
      zs.push_back(z);
    }
  }
  dedupe_sorted(zs);

  const int expected = argument_principle_count(region, cfg.eval) + (pole_inside(region) ? 1 : 0);
  if (static_cast<int>(zs.size()) != expected && cfg.box_refinement) {
    std::vector<Complex> found;
    refine_boxes(region, cfg.eval, 10, found);
    for (const Complex s : found) {
      const bool known = std::any_of(zs.begin(), zs.end(), [&](const ZeroRecord& z) { return std::abs(z.s() - s) < 1e-6; });
      if (known || !(s.real() > 0.0 && s.real() < 1.0)) continue;
      ZeroRecord z;
      z.sigma = s.real();
      z.t = s.imag();
      z.residual = std::abs(eval_zeta_pair(s, cfg.eval).value);
      z.method = ZeroMethod::BoxRefinement;
      zs.push_back(z);
    }
    dedupe_sorted(zs);
  }
  if (static_cast<int>(zs.size()) != expected) {
    throw Error(ErrorCode::CountMismatch, std::to_string(zs.size()) + " zeros located, argument principle gives " +
                                              std::to_string(expected));
  }
  for (auto& z : zs) {
    const LocalOrder lo = local_order(z.s(), cfg.probe_radius, cfg.eval);
    z.local_order = lo.k;
    z.anomalous = lo.k != 1;
  }
  return zs;
}

double default_gap_tol(double t_max) noexcept {
  if (t_max <= 110.0) return 0.5;
  return 0.5 * std::log(110.0) / std::log(t_max);
}

DistinctOrdinatesReport check_distinct_ordinates(std::span<const ZeroRecord> zeros, double gap_tol) {
  std::vector<ZeroRecord> sorted(zeros.begin(), zeros.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const ZeroRecord& a, const ZeroRecord& b) { return a.t < b.t; });
  DistinctOrdinatesReport rep;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (!(sorted[i + 1].t - sorted[i].t > gap_tol)) rep.offending.emplace_back(sorted[i], sorted[i + 1]);
  }
  rep.pass = rep.offending.empty();
  return rep;
}

CriticalLineReport check_critical_line(std::span<const ZeroRecord> zeros, double line_tol, const EvalConfig& cfg) {
  CriticalLineReport rep;
  for (const auto& z : zeros) {
    rep.max_deviation = std::max(rep.max_deviation, std::abs(z.sigma - 0.5));
    const double pair = std::abs(eval_zeta_pair(Complex(1.0 - z.sigma, z.t), cfg).value);
    rep.max_pair_residual = std::max(rep.max_pair_residual, pair);
  }
  rep.pass = rep.max_deviation < line_tol && rep.max_pair_residual < 1e-6;
  return rep;
}

BranchReport check_no_branch_on_gamma_prime(const TracedCurve& curve, const EvalConfig& cfg) {
  if (curve.kind.tag() != CurveTag::PreimageAboveOne) {
    throw Error(ErrorCode::InvalidConfig, "branch check expects a PreimageAboveOne curve");
  }
  BranchReport rep;
  rep.min_abs_zeta_prime = std::numeric_limits<double>::infinity();
  bool inc = true, dec = true;
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    rep.min_abs_zeta_prime = std::min(rep.min_abs_zeta_prime, std::abs(eval_zeta_pair(curve.samples[i].s, cfg).deriv));
    if (i > 0) {
      const double d = curve.samples[i].z.real() - curve.samples[i - 1].z.real();
      if (!(d > 0.0)) inc = false;
      if (!(d < 0.0)) dec = false;
    }
  }
  rep.monotone = inc || dec;
  rep.pass = rep.monotone && rep.min_abs_zeta_prime > 1e-6;
  return rep;
}

}  // namespace zatlas
