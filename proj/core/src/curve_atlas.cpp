#include "zatlas/curve_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "zatlas/error.hpp"

namespace zatlas {
namespace {

constexpr double kBranchAbsDeriv = 1e-8;
constexpr double kPoleGuard = 0.05;
constexpr double kMaxTurn = 0.5;  // radians per accepted step

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double u = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return std::abs(p - (a + u * ab));
}

bool segments_intersect(Complex a, Complex b, Complex c, Complex d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

double segment_segment_distance(Complex a, Complex b, Complex c, Complex d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d), point_segment_distance(c, a, b),
                   point_segment_distance(d, a, b)});
}

struct BBox {
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  void add(Complex p) {
    lo_x = std::min(lo_x, p.real());
    hi_x = std::max(hi_x, p.real());
    lo_y = std::min(lo_y, p.imag());
    hi_y = std::max(hi_y, p.imag());
  }
  double distance(const BBox& o) const {
    const double dx = std::max({0.0, o.lo_x - hi_x, lo_x - o.hi_x});
    const double dy = std::max({0.0, o.lo_y - hi_y, lo_y - o.hi_y});
    return std::hypot(dx, dy);
  }
  double distance(Complex p) const {
    const double dx = std::max({0.0, p.real() - hi_x, lo_x - p.real()});
    const double dy = std::max({0.0, p.imag() - hi_y, lo_y - p.imag()});
    return std::hypot(dx, dy);
  }
};

BBox bbox_of(const TracedCurve& c) {
  BBox b;
  for (const auto& smp : c.samples) b.add(smp.s);
  return b;
}

// Level condition and its Newton projection for either level family.
struct Level {
  CurveKind kind;

  double residual(Complex z) const {
    if (kind.real_axis()) return z.imag();
    return std::abs(z) - *kind.radius();
  }

  Complex newton_step(Complex z, Complex dz) const {
    if (kind.real_axis()) return Complex(0.0, -z.imag()) / dz;
    return -(std::log(std::abs(z)) - std::log(*kind.radius())) * z / dz;
  }

  // Unit tangent; the real-axis family moves with Re zeta increasing, the
  // circle family with arg zeta increasing.
  Complex tangent(Complex z, Complex dz) const {
    Complex g = kind.real_axis() ? std::conj(dz) : Complex(0.0, 1.0) * std::conj(dz / z);
    return g / std::abs(g);
  }

  // Derivative of the residual along direction e.
  double directional(Complex z, Complex dz, Complex e) const {
    if (kind.real_axis()) return (dz * e).imag();
    return (std::conj(z) * dz * e).real() / std::abs(z);
  }
};

struct Leg {
  std::vector<CurveSample> pts;
  EndKind end = EndKind::EscapesDomain;
  std::optional<Complex> terminal;
};

class Tracer {
 public:
  Tracer(const TraceConfig& cfg, CurveKind kind) : cfg_(cfg), level_{kind} {}

  ZetaPair eval(Complex s) const { return eval_zeta_pair(s, cfg_.eval); }

  // Newton projection onto the level set. Returns the number of iterations
  // used, or -1 on failure. `p` holds zeta at the final `s`.
  int correct(Complex& s, ZetaPair& p, int max_iter = 8) const {
    for (int it = 0; it <= max_iter; ++it) {
      p = eval(s);
      if (std::abs(level_.residual(p.value)) < cfg_.corrector_tol) return it;
      if (it == max_iter || std::abs(p.deriv) == 0.0) break;
      const Complex step = level_.newton_step(p.value, p.deriv);
      if (!is_finite(step)) break;
      s += step;
      if (std::abs(s - 1.0) <= cfg_.eval.pole_exclusion_radius * 10.0) break;
    }
    return -1;
  }

  bool same_class(Complex z0, Complex z1) const {
    if (!level_.kind.real_axis()) return true;
    return (z0.real() < 1.0) == (z1.real() < 1.0);
  }

  Leg run(Complex start, const ZetaPair& start_pair, double dir, int budget, bool detect_loop) const {
    Leg leg;
    Complex s = start;
    ZetaPair p = start_pair;
    double h = cfg_.max_step;
    double arclen = 0.0;
    const Rect& box = cfg_.domain_box;

    while (true) {
      if (static_cast<int>(leg.pts.size()) >= budget) {
        leg.end = EndKind::SampleLimit;
        return leg;
      }
      if (std::abs(p.deriv) < kBranchAbsDeriv) {
        throw Error(ErrorCode::BranchPointEncountered, "|zeta'| < 1e-8 at " + describe(s));
      }
      const Complex tan = dir * level_.tangent(p.value, p.deriv);

      Complex q;
      ZetaPair qp;
      int iters = -1;
      while (true) {
        const Complex pred = s + h * tan;
        if (std::abs(pred - 1.0) < kPoleGuard) {
          leg.end = EndKind::EscapesDomain;
          return leg;
        }
        q = pred;
        iters = correct(q, qp);
        bool ok = iters >= 0;
        if (ok && std::abs(q - pred) > 0.5 * h) ok = false;
        if (ok) {
          const Complex tq = dir * level_.tangent(qp.value, qp.deriv);
          if (dot(tq, tan) < std::cos(kMaxTurn)) ok = false;
        }
        if (ok) break;
        h *= 0.5;
        if (h < cfg_.min_step) {
          throw Error(ErrorCode::BranchPointEncountered,
                      "step halving exhausted at " + describe(s) + ", |zeta'| = " + std::to_string(std::abs(p.deriv)));
        }
      }

      if (!same_class(p.value, qp.value)) {
        leg.end = EndKind::OnePoint;
        leg.terminal = locate_one(s, q);
        return leg;
      }

      if (!box.contains(q)) {
        const auto [edge_point, right] = clip(s, p, q);
        if (edge_point) leg.pts.push_back(*edge_point);
        leg.end = right ? EndKind::EscapesRight : EndKind::EscapesDomain;
        return leg;
      }

      leg.pts.push_back({q, qp.value});
      arclen += std::abs(q - s);
      s = q;
      p = qp;
      if (detect_loop && arclen > 4.0 * cfg_.max_step && std::abs(q - start) < h) {
        leg.end = EndKind::ClosedLoop;
        return leg;
      }
      if (iters <= 2) h = std::min(1.5 * h, cfg_.max_step);
    }
  }

 private:
  static std::string describe(Complex s) {
    return "(" + std::to_string(s.real()) + ", " + std::to_string(s.imag()) + ")";
  }

  // Point where zeta = 1 between two samples of opposite class.
  Complex locate_one(Complex a, Complex b) const {
    Complex s = 0.5 * (a + b);
    for (int it = 0; it < 40; ++it) {
      const auto p = eval(s);
      const Complex f = p.value - 1.0;
      if (std::abs(f) < 1e-14) break;
      const Complex step = f / p.deriv;
      s -= step;
      if (std::abs(step) < 1e-15) break;
    }
    return s;
  }

  // Level point on the box edge crossed by the segment inside -> outside.
  std::pair<std::optional<CurveSample>, bool> clip(Complex in, const ZetaPair& in_pair, Complex out) const {
    const Rect& box = cfg_.domain_box;
    const Complex d = out - in;
    double lambda = 1.0;
    int edge = -1;  // 0 right, 1 top, 2 left, 3 bottom
    auto consider = [&](double l, int e) {
      if (l >= 0.0 && l < lambda) {
        lambda = l;
        edge = e;
      }
    };
    if (out.real() > box.sigma_max) consider((box.sigma_max - in.real()) / d.real(), 0);
    if (out.imag() > box.t_max) consider((box.t_max - in.imag()) / d.imag(), 1);
    if (out.real() < box.sigma_min) consider((box.sigma_min - in.real()) / d.real(), 2);
    if (out.imag() < box.t_min) consider((box.t_min - in.imag()) / d.imag(), 3);
    const bool right = edge == 0;
    if (edge < 0) return {std::nullopt, right};

    const Complex dir = (edge == 0 || edge == 2) ? Complex(0.0, 1.0) : Complex(1.0, 0.0);
    Complex b = in + lambda * d;
    auto snap = [&](Complex z) {
      switch (edge) {
        case 0: return Complex(box.sigma_max, z.imag());
        case 1: return Complex(z.real(), box.t_max);
        case 2: return Complex(box.sigma_min, z.imag());
        default: return Complex(z.real(), box.t_min);
      }
    };
    b = snap(b);
    const Complex b0 = b;
    for (int it = 0; it < 12; ++it) {
      const auto p = eval(b);
      const double res = level_.residual(p.value);
      if (std::abs(res) < cfg_.corrector_tol) {
        if (!box.contains(b) || std::abs(b - b0) > cfg_.max_step || !same_class(in_pair.value, p.value)) break;
        // The previous sample already sits on this edge.
        if (std::abs(b - in) < 1e-9) break;
        return {CurveSample{b, p.value}, right};
      }
      const double deriv = level_.directional(p.value, p.deriv, dir);
      if (deriv == 0.0) break;
      b = snap(b - (res / deriv) * dir);
    }
    return {std::nullopt, right};
  }

  const TraceConfig& cfg_;
  Level level_;
};

TracedCurve trace_any(Complex seed, CurveKind kind, const TraceConfig& cfg) {
  cfg.validate();
  const Tracer tracer(cfg, kind);
  if (!is_finite(seed) || !cfg.domain_box.contains(seed)) {
    throw Error(ErrorCode::SeedInvalid, "seed outside the domain box");
  }
  Complex s = seed;
  ZetaPair p;
  if (tracer.correct(s, p) < 0 || std::abs(s - seed) > cfg.max_step || !cfg.domain_box.contains(s)) {
    throw Error(ErrorCode::SeedInvalid, "seed does not satisfy the level condition");
  }
  if (kind.tag() == CurveTag::PreimageBelowOne && !(p.value.real() < 1.0)) {
    throw Error(ErrorCode::SeedInvalid, "seed has Re zeta >= 1 for a below-one pre-image");
  }
  if (kind.tag() == CurveTag::PreimageAboveOne && !(p.value.real() > 1.0)) {
    throw Error(ErrorCode::SeedInvalid, "seed has Re zeta <= 1 for an above-one pre-image");
  }
  if (std::abs(p.deriv) < kBranchAbsDeriv) {
    throw Error(ErrorCode::BranchPointEncountered, "seed sits on a critical point of zeta");
  }

  const int budget = std::max(cfg.max_samples - 1, 1);
  Leg fwd = tracer.run(s, p, 1.0, budget, true);

  TracedCurve c;
  c.kind = kind;
  if (fwd.end == EndKind::ClosedLoop) {
    c.samples.push_back({s, p.value});
    c.samples.insert(c.samples.end(), fwd.pts.begin(), fwd.pts.end());
    c.ends = {EndKind::ClosedLoop, EndKind::ClosedLoop};
    return c;
  }
  const int rest = std::max(budget - static_cast<int>(fwd.pts.size()), 0);
  Leg bwd = rest > 0 ? tracer.run(s, p, -1.0, rest, false) : Leg{{}, EndKind::SampleLimit, std::nullopt};

  c.samples.reserve(bwd.pts.size() + fwd.pts.size() + 1);
  c.samples.insert(c.samples.end(), bwd.pts.rbegin(), bwd.pts.rend());
  c.samples.push_back({s, p.value});
  c.samples.insert(c.samples.end(), fwd.pts.begin(), fwd.pts.end());
  c.ends = {bwd.end, fwd.end};
  c.terminals = {bwd.terminal, fwd.terminal};
  // The forward leg raises Re zeta; Gamma curves are stored the other way.
  if (kind.tag() == CurveTag::PreimageBelowOne) {
    std::reverse(c.samples.begin(), c.samples.end());
    std::swap(c.ends[0], c.ends[1]);
    std::swap(c.terminals[0], c.terminals[1]);
  }
  return c;
}

int kind_rank(const CurveKind& k) {
  switch (k.tag()) {
    case CurveTag::PreimageBelowOne: return 0;
    case CurveTag::PreimageAboveOne: return 1;
    case CurveTag::CirclePreimage: return 2;
  }
  return 3;
}

void sort_and_number(Atlas& atlas) {
  std::stable_sort(atlas.curves.begin(), atlas.curves.end(), [](const TracedCurve& a, const TracedCurve& b) {
    const auto ka = std::make_tuple(kind_rank(a.kind), a.samples.front().s.imag(), a.samples.front().s.real());
    const auto kb = std::make_tuple(kind_rank(b.kind), b.samples.front().s.imag(), b.samples.front().s.real());
    return ka < kb;
  });
  for (std::size_t i = 0; i < atlas.curves.size(); ++i) atlas.curves[i].id = static_cast<int>(i);
}

bool near_existing(const Atlas& atlas, const std::vector<BBox>& boxes, Complex p, const CurveKind& kind,
                   double tol) {
  for (std::size_t i = 0; i < atlas.curves.size(); ++i) {
    if (!(atlas.curves[i].kind == kind)) continue;
    if (boxes[i].distance(p) >= tol) continue;
    if (point_curve_distance(p, atlas.curves[i]) < tol) return true;
  }
  return false;
}

void add_traced(Atlas& atlas, std::vector<BBox>& boxes, const Seed& seed, const TraceConfig& cfg) {
  if (near_existing(atlas, boxes, seed.s, seed.kind, cfg.max_step)) return;
  try {
    TracedCurve c = trace_level_curve(seed.s, seed.kind, cfg);
    boxes.push_back(bbox_of(c));
    atlas.curves.push_back(std::move(c));
  } catch (const Error& e) {
    atlas.events.push_back({seed.s, e.what()});
  }
}

}  // namespace

std::string_view to_string(CurveTag tag) noexcept {
  switch (tag) {
    case CurveTag::PreimageBelowOne: return "PreimageBelowOne";
    case CurveTag::PreimageAboveOne: return "PreimageAboveOne";
    case CurveTag::CirclePreimage: return "CirclePreimage";
  }
  return "Unknown";
}

std::string_view to_string(EndKind e) noexcept {
  switch (e) {
    case EndKind::EscapesRight: return "EscapesRight";
    case EndKind::EscapesDomain: return "EscapesDomain";
    case EndKind::ClosedLoop: return "ClosedLoop";
    case EndKind::OnePoint: return "OnePoint";
    case EndKind::SampleLimit: return "SampleLimit";
  }
  return "Unknown";
}

CurveKind CurveKind::circle(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidConfig, "circle radius must be > 0");
  return CurveKind(CurveTag::CirclePreimage, r);
}

void TraceConfig::validate() const {
  auto fail = [](const char* msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (!(max_step > 0.0)) fail("max_step must be > 0");
  if (!(min_step > 0.0)) fail("min_step must be > 0");
  if (!(min_step < max_step)) fail("min_step must be < max_step");
  if (!(corrector_tol > 0.0 && corrector_tol < min_step)) fail("corrector_tol must lie in (0, min_step)");
  if (!domain_box.valid()) fail("domain_box is degenerate");
  if (max_samples < 2) fail("max_samples must be >= 2");
  eval.validate();
}

std::vector<Seed> seed_real_axis_preimages(const Rect& box, const TraceConfig& cfg) {
  cfg.validate();
  if (!box.valid()) throw Error(ErrorCode::InvalidConfig, "scan box is degenerate");
  const double h = cfg.max_step / 4.0;
  std::vector<Seed> seeds;

  auto im_at = [&](Complex s) -> std::optional<ZetaPair> {
    try {
      return eval_zeta_pair(s, cfg.eval);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  auto push = [&](Complex s, Complex z) {
    if (z.real() == 1.0) return;
    for (const auto& e : seeds) {
      if (std::abs(e.s - s) < 1e-9) return;
    }
    seeds.push_back({s, z.real() < 1.0 ? CurveKind::below_one() : CurveKind::above_one()});
  };
  auto bisect = [&](Complex a, double fa, Complex b) {
    for (int it = 0; it < 200; ++it) {
      const Complex m = 0.5 * (a + b);
      const auto pm = im_at(m);
      if (!pm) return;
      const double fm = pm->value.imag();
      if (std::abs(fm) < cfg.corrector_tol || std::abs(b - a) < 1e-15 * (1.0 + std::abs(m))) {
        if (std::abs(fm) < cfg.corrector_tol) push(m, pm->value);
        return;
      }
      if ((fm < 0.0) == (fa < 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
  };
  auto scan = [&](Complex from, Complex to) {
    const double len = std::abs(to - from);
    const int n = std::max(2, static_cast<int>(std::ceil(len / h)) + 1);
    // An edge lying on the real axis is itself a level curve; skip it.
    if (from.imag() == 0.0 && to.imag() == 0.0) return;
    std::optional<ZetaPair> prev;
    Complex prev_s;
    for (int i = 0; i < n; ++i) {
      const Complex s = from + (to - from) * (static_cast<double>(i) / (n - 1));
      const auto cur = im_at(s);
      if (cur && cur->value.imag() == 0.0) push(s, cur->value);
      if (cur && prev) {
        const double fa = prev->value.imag(), fb = cur->value.imag();
        if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) bisect(prev_s, fa, s);
      }
      prev = cur;
      prev_s = s;
    }
  };
  const Complex br(box.sigma_max, box.t_min), tr(box.sigma_max, box.t_max);
  const Complex tl(box.sigma_min, box.t_max), bl(box.sigma_min, box.t_min);
  scan(br, tr);
  scan(tr, tl);
  scan(tl, bl);
  scan(bl, br);
  return seeds;
}

TracedCurve trace_level_curve(Complex seed, CurveKind kind, const TraceConfig& cfg) {
  if (!kind.real_axis()) throw Error(ErrorCode::InvalidConfig, "trace_level_curve expects a real-axis kind");
  return trace_any(seed, kind, cfg);
}

TracedCurve trace_circle_preimage(double r, Complex seed, const TraceConfig& cfg) {
  TracedCurve c = trace_any(seed, CurveKind::circle(r), cfg);
  return c;
}

double point_curve_distance(Complex p, const TracedCurve& c) {
  if (c.samples.empty()) return std::numeric_limits<double>::infinity();
  if (c.samples.size() == 1) return std::abs(p - c.samples[0].s);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
    best = std::min(best, point_segment_distance(p, c.samples[i].s, c.samples[i + 1].s));
  }
  return best;
}

double curve_min_distance(const TracedCurve& a, const TracedCurve& b) {
  if (a.samples.empty() || b.samples.empty()) throw Error(ErrorCode::InvalidConfig, "empty curve");
  if (a.samples.size() == 1) return point_curve_distance(a.samples[0].s, b);
  if (b.samples.size() == 1) return point_curve_distance(b.samples[0].s, a);
  // Segment boxes of b in blocks, so most of b is skipped for far segments.
  constexpr std::size_t kBlock = 32;
  std::vector<BBox> blocks;
  for (std::size_t i = 0; i + 1 < b.samples.size(); i += kBlock) {
    BBox bb;
    for (std::size_t j = i; j <= std::min(i + kBlock, b.samples.size() - 1); ++j) bb.add(b.samples[j].s);
    blocks.push_back(bb);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < a.samples.size(); ++i) {
    BBox seg;
    seg.add(a.samples[i].s);
    seg.add(a.samples[i + 1].s);
    for (std::size_t blk = 0; blk < blocks.size(); ++blk) {
      if (seg.distance(blocks[blk]) >= best) continue;
      const std::size_t lo = blk * kBlock;
      const std::size_t hi = std::min(lo + kBlock, b.samples.size() - 1);
      for (std::size_t j = lo; j < hi; ++j) {
        best = std::min(best, segment_segment_distance(a.samples[i].s, a.samples[i + 1].s, b.samples[j].s,
                                                       b.samples[j + 1].s));
        if (best == 0.0) return 0.0;
      }
    }
  }
  return best;
}

double hausdorff_distance(const TracedCurve& a, const TracedCurve& b) {
  double worst = 0.0;
  for (const auto& smp : a.samples) worst = std::max(worst, point_curve_distance(smp.s, b));
  for (const auto& smp : b.samples) worst = std::max(worst, point_curve_distance(smp.s, a));
  return worst;
}

std::optional<CurvePoint> point_at_value(const TracedCurve& c, double value) {
  for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
    const double a = c.samples[i].z.real() - value;
    const double b = c.samples[i + 1].z.real() - value;
    if (a == 0.0 || (a < 0.0) != (b < 0.0)) {
      const Complex p0 = c.samples[i].s, p1 = c.samples[i + 1].s;
      const double f = a == 0.0 ? 0.0 : a / (a - b);
      const Complex chord = p1 - p0;
      return CurvePoint{p0 + f * chord, chord / std::abs(chord)};
    }
  }
  return std::nullopt;
}

std::optional<double> value_at_sigma(const TracedCurve& c, double sigma_probe) {
  for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
    const double a = c.samples[i].s.real() - sigma_probe;
    const double b = c.samples[i + 1].s.real() - sigma_probe;
    if (a == 0.0 || (a < 0.0) != (b < 0.0)) {
      const double f = a == 0.0 ? 0.0 : a / (a - b);
      return c.samples[i].z.real() + f * (c.samples[i + 1].z.real() - c.samples[i].z.real());
    }
  }
  if (!c.samples.empty() && c.samples.back().s.real() == sigma_probe) return c.samples.back().z.real();
  return std::nullopt;
}

double tangent_angle_between(const TracedCurve& a, const TracedCurve& b, double z_param) {
  const auto pa = point_at_value(a, z_param);
  const auto pb = point_at_value(b, z_param);
  if (!pa || !pb) throw Error(ErrorCode::ParamNotAttained, "z = " + std::to_string(z_param) + " not attained");
  return std::abs(std::arg(std::conj(pa->tangent) * pb->tangent));
}

namespace {

// Seed on {|zeta| = r} next to a simple zero.
std::optional<Complex> circle_seed(Complex zero, double r, const TraceConfig& cfg) {
  const auto p0 = eval_zeta_pair(zero, cfg.eval);
  Complex s = zero + r / std::abs(p0.deriv);
  for (int it = 0; it < 40; ++it) {
    const auto p = eval_zeta_pair(s, cfg.eval);
    const double res = std::abs(p.value) - r;
    if (std::abs(res) < cfg.corrector_tol) return s;
    if (std::abs(p.value) == 0.0) return std::nullopt;
    s -= (std::log(std::abs(p.value)) - std::log(r)) * p.value / p.deriv;
  }
  return std::nullopt;
}

// Winding number of a closed polyline about p.
int winding(const TracedCurve& c, Complex p) {
  double total = 0.0;
  const std::size_t n = c.samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = c.samples[i].s - p;
    const Complex b = c.samples[(i + 1) % n].s - p;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

struct Pairing {
  bool merged = false;
  std::optional<TracedCurve> a, b;
};

Pairing components_at(Complex za, Complex zb, double r, const TraceConfig& cfg) {
  Pairing out;
  const auto sa = circle_seed(za, r, cfg);
  const auto sb = circle_seed(zb, r, cfg);
  if (!sa || !sb) {
    out.merged = true;
    return out;
  }
  try {
    out.a = trace_circle_preimage(r, *sa, cfg);
    out.b = trace_circle_preimage(r, *sb, cfg);
  } catch (const Error&) {
    // The level set is singular only at the merge radius itself.
    out.merged = true;
    return out;
  }
  if (out.a->closed()) {
    out.merged = winding(*out.a, zb) != 0;
  } else if (out.b->closed()) {
    out.merged = winding(*out.b, za) != 0;
  } else {
    out.merged = curve_min_distance(*out.a, *out.b) < 1e-6;
  }
  return out;
}

Complex critical_point_newton(Complex s, const EvalConfig& cfg) {
  const double h = 1e-5;
  for (int it = 0; it < 40; ++it) {
    const Complex d = eval_zeta_pair(s, cfg).deriv;
    if (std::abs(d) < 1e-13) break;
    const Complex d2 = (eval_zeta_pair(s + h, cfg).deriv - eval_zeta_pair(s - h, cfg).deriv) / (2.0 * h);
    const Complex step = d / d2;
    s -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return s;
}

}  // namespace

TouchResult find_touch_radius(Complex zero_a, Complex zero_b, const TraceConfig& cfg) {
  cfg.validate();
  TouchResult res;
  const double r_hi = 1.0 - 1e-6;
  if (!components_at(zero_a, zero_b, r_hi, cfg).merged) return res;

  double lo = 1e-3, hi = r_hi;
  if (components_at(zero_a, zero_b, lo, cfg).merged) {
    throw Error(ErrorCode::Inconclusive, "components already merged at r = 1e-3");
  }
  Pairing below;
  while (hi - lo > 1e-7 * hi) {
    const double mid = 0.5 * (lo + hi);
    Pairing p = components_at(zero_a, zero_b, mid, cfg);
    if (p.merged) {
      hi = mid;
    } else {
      lo = mid;
      below = std::move(p);
    }
  }
  res.touches = true;
  res.r0 = hi;
  if (below.a && below.b) {
    // Closest approach of the two components just below the merge radius.
    double best = std::numeric_limits<double>::infinity();
    Complex guess;
    for (const auto& sa : below.a->samples) {
      for (const auto& sb : below.b->samples) {
        const double d = std::abs(sa.s - sb.s);
        if (d < best) {
          best = d;
          guess = 0.5 * (sa.s + sb.s);
        }
      }
    }
    const Complex tp = critical_point_newton(guess, cfg.eval);
    res.touch_point = tp;
    res.touch_abs_zeta_prime = std::abs(eval_zeta_pair(tp, cfg.eval).deriv);
  }
  return res;
}

Atlas build_atlas(const TraceConfig& cfg) {
  Atlas atlas;
  atlas.box = cfg.domain_box;
  std::vector<BBox> boxes;
  for (const auto& seed : seed_real_axis_preimages(cfg.domain_box, cfg)) add_traced(atlas, boxes, seed, cfg);
  sort_and_number(atlas);
  return atlas;
}

void reseed_atlas(Atlas& atlas, std::span<const Complex> points, const TraceConfig& cfg) {
  std::vector<BBox> boxes;
  for (const auto& c : atlas.curves) boxes.push_back(bbox_of(c));
  for (const Complex p : points) {
    ZetaPair v;
    try {
      v = eval_zeta_pair(p, cfg.eval);
    } catch (const Error& e) {
      atlas.events.push_back({p, e.what()});
      continue;
    }
    const CurveKind kind = v.value.real() < 1.0 ? CurveKind::below_one() : CurveKind::above_one();
    add_traced(atlas, boxes, {p, kind}, cfg);
  }
  sort_and_number(atlas);
}

TracedCurve extend_right(const TracedCurve& c, double new_sigma_max, const TraceConfig& cfg) {
  if (c.samples.empty()) throw Error(ErrorCode::InvalidConfig, "empty curve");
  TraceConfig wide = cfg;
  wide.domain_box.sigma_max = std::max(new_sigma_max, cfg.domain_box.sigma_max);
  // Seed from the sample with the largest sigma.
  const auto it = std::max_element(c.samples.begin(), c.samples.end(),
                                   [](const CurveSample& x, const CurveSample& y) { return x.s.real() < y.s.real(); });
  TracedCurve out = trace_level_curve(it->s, c.kind, wide);
  out.id = c.id;
  out.strip_index = c.strip_index;
  out.component_index = c.component_index;
  return out;
}

TracedCurve mirror(const TracedCurve& c) {
  TracedCurve m = c;
  for (auto& smp : m.samples) {
    smp.s = std::conj(smp.s);
    smp.z = std::conj(smp.z);
  }
  for (auto& t : m.terminals) {
    if (t) t = std::conj(*t);
  }
  if (!c.kind.real_axis()) {
    std::reverse(m.samples.begin(), m.samples.end());
    std::swap(m.ends[0], m.ends[1]);
    std::swap(m.terminals[0], m.terminals[1]);
  }
  return m;
}

}  // namespace zatlas
