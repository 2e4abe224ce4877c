#include "zatlas/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>

#include "zatlas/error.hpp"

namespace zatlas {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s = trim(v);
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x)) {
    throw Error(ErrorCode::ParseError, "bad number for " + std::string(key) + ": '" + s + "'");
  }
  return x;
}

int to_int(std::string_view key, std::string_view v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw Error(ErrorCode::ParseError, std::string(key) + " must be an integer");
  return static_cast<int>(x);
}

bool to_bool(std::string_view key, std::string_view v) {
  const std::string s = trim(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(ErrorCode::ParseError, "bad boolean for " + std::string(key) + ": '" + s + "'");
}

std::string fmt(double x) { return format_double(x); }

std::string fmt_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

const TracedCurve* find_curve(const Atlas& atlas, int id) {
  for (const auto& c : atlas.curves) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::optional<CurveSample> right_end_sample(const TracedCurve& c) {
  if (c.ends[0] == EndKind::EscapesRight) return c.samples.front();
  if (c.ends[1] == EndKind::EscapesRight) return c.samples.back();
  return std::nullopt;
}

RectRegion zero_region(const RunConfig& cfg) {
  const ScanRegion& r = cfg.region;
  return {std::max(r.sigma_lo, 0.0), std::min(r.sigma_hi, 1.0), r.t_lo, r.t_hi};
}

}  // namespace

void ScanRegion::validate() const {
  auto fail = [](const char* m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (!(t_lo > 0.0)) fail("t_min must be > 0 (the lower half-plane comes from --mirror)");
  if (!(sigma_lo < sigma_hi)) fail("sigma_min must be < sigma_max");
  if (!(t_lo < t_hi)) fail("t_min must be < t_max");
  if (!(t_hi <= 400.0)) fail("t_max must be <= 400");
}

void RunConfig::validate() const {
  region.validate();
  TraceConfig tc = trace;
  tc.domain_box = region.box();
  tc.validate();
  if (lemma2_probes.empty()) throw Error(ErrorCode::InvalidConfig, "lemma2_probes must not be empty");
  if (lemma2_strips < 0) throw Error(ErrorCode::InvalidConfig, "lemma2_strips must be >= 0");
  if (!(line_tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "line_tol must be > 0");
  if (gap_tol && !(*gap_tol > 0.0)) throw Error(ErrorCode::InvalidConfig, "gap_tol must be > 0");
  if (!(zeros.probe_radius > 0.0)) throw Error(ErrorCode::InvalidConfig, "probe_radius must be > 0");
}

void apply_config_value(RunConfig& cfg, std::string_view key_in, std::string_view value) {
  const std::string key = trim(key_in);
  EvalConfig& ev = cfg.trace.eval;
  if (key == "t_min") cfg.region.t_lo = to_double(key, value);
  else if (key == "t_max") cfg.region.t_hi = to_double(key, value);
  else if (key == "sigma_min") cfg.region.sigma_lo = to_double(key, value);
  else if (key == "sigma_max") cfg.region.sigma_hi = to_double(key, value);
  else if (key == "mirror") cfg.region.mirror = to_bool(key, value);
  else if (key == "step") cfg.trace.max_step = to_double(key, value);
  else if (key == "min_step") cfg.trace.min_step = to_double(key, value);
  else if (key == "tol") cfg.trace.corrector_tol = to_double(key, value);
  else if (key == "max_samples") cfg.trace.max_samples = to_int(key, value);
  else if (key == "em_terms") {
    const std::string v = trim(value);
    if (v == "auto") ev.em_terms.reset();
    else ev.em_terms = to_int(key, v);
  }
  else if (key == "bernoulli_order") ev.bernoulli_order = to_int(key, value);
  else if (key == "laurent_terms") ev.laurent_terms = to_int(key, value);
  else if (key == "target_abs_tol") ev.target_abs_tol = to_double(key, value);
  else if (key == "pole_exclusion_radius") ev.pole_exclusion_radius = to_double(key, value);
  else if (key == "reflection_limit_mode") ev.reflection_limit_mode = to_bool(key, value);
  else if (key == "box_refinement") cfg.zeros.box_refinement = to_bool(key, value);
  else if (key == "probe_radius") cfg.zeros.probe_radius = to_double(key, value);
  else if (key == "lemma2_strips") cfg.lemma2_strips = to_int(key, value);
  else if (key == "line_tol") cfg.line_tol = to_double(key, value);
  else if (key == "gap_tol") {
    const std::string v = trim(value);
    if (v == "auto") cfg.gap_tol.reset();
    else cfg.gap_tol = to_double(key, v);
  }
  else if (key == "lemma2_probes") {
    cfg.lemma2_probes.clear();
    std::string cur;
    const std::string v = trim(value) + ",";
    for (const char c : v) {
      if (c == ',') {
        if (!trim(cur).empty()) cfg.lemma2_probes.push_back(to_double(key, cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
  }
  else throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected key = value");
    }
    apply_config_value(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

std::vector<std::pair<std::string, std::string>> config_snapshot(const RunConfig& cfg) {
  const EvalConfig& ev = cfg.trace.eval;
  std::string probes;
  for (std::size_t i = 0; i < cfg.lemma2_probes.size(); ++i) probes += (i ? "," : "") + fmt(cfg.lemma2_probes[i]);
  std::vector<std::pair<std::string, std::string>> kv = {
      {"bernoulli_order", std::to_string(ev.bernoulli_order)},
      {"box_refinement", cfg.zeros.box_refinement ? "true" : "false"},
      {"em_terms", ev.em_terms ? std::to_string(*ev.em_terms) : "auto"},
      {"gap_tol", cfg.gap_tol ? fmt(*cfg.gap_tol) : "auto"},
      {"laurent_terms", std::to_string(ev.laurent_terms)},
      {"lemma2_probes", probes},
      {"lemma2_strips", std::to_string(cfg.lemma2_strips)},
      {"line_tol", fmt(cfg.line_tol)},
      {"max_samples", std::to_string(cfg.trace.max_samples)},
      {"min_step", fmt(cfg.trace.min_step)},
      {"mirror", cfg.region.mirror ? "true" : "false"},
      {"pole_exclusion_radius", fmt(ev.pole_exclusion_radius)},
      {"probe_radius", fmt(cfg.zeros.probe_radius)},
      {"reflection_limit_mode", ev.reflection_limit_mode ? "true" : "false"},
      {"sigma_max", fmt(cfg.region.sigma_hi)},
      {"sigma_min", fmt(cfg.region.sigma_lo)},
      {"step", fmt(cfg.trace.max_step)},
      {"t_max", fmt(cfg.region.t_hi)},
      {"t_min", fmt(cfg.region.t_lo)},
      {"target_abs_tol", fmt(ev.target_abs_tol)},
      {"tol", fmt(cfg.trace.corrector_tol)},
  };
  return kv;
}

Atlas run_trace(const RunConfig& cfg) {
  cfg.validate();
  TraceConfig tc = cfg.trace;
  tc.domain_box = cfg.region.box();
  return build_atlas(tc);
}

std::vector<ZeroRecord> run_zeros(const RunConfig& cfg, const Atlas& atlas) {
  const RectRegion region = zero_region(cfg);
  if (!region.valid()) return {};
  ZeroSearchConfig zc = cfg.zeros;
  zc.eval = cfg.trace.eval;
  return find_zeros(region, atlas.curves, zc);
}

ScanResult run_scan(const RunConfig& cfg) {
  ScanResult out;
  out.atlas = run_trace(cfg);
  out.zeros = run_zeros(cfg, out.atlas);

  // Zeros found only by box refinement sit on Gamma curves the edge seeding missed.
  std::vector<Complex> missed;
  for (const auto& z : out.zeros) {
    if (z.method == ZeroMethod::BoxRefinement) missed.push_back(z.s());
  }
  if (!missed.empty()) {
    TraceConfig tc = cfg.trace;
    tc.domain_box = cfg.region.box();
    reseed_atlas(out.atlas, missed, tc);
    out.zeros = run_zeros(cfg, out.atlas);
  }

  out.strips = assemble_strips(out.atlas.curves, out.zeros, cfg.region.box(), cfg.trace.eval);
  for (auto& c : out.atlas.curves) {
    c.strip_index.reset();
    c.component_index.reset();
  }
  for (const auto& st : out.strips) {
    for (std::size_t k = 0; k < st.gamma_components.size(); ++k) {
      auto& c = out.atlas.curves.at(static_cast<std::size_t>(st.gamma_components[k]));
      c.strip_index = st.j;
      c.component_index = static_cast<int>(k);
    }
    for (const int id : st.gamma_prime_pieces) out.atlas.curves.at(static_cast<std::size_t>(id)).strip_index = st.j;
    if (st.lower_gamma_prime) out.atlas.curves.at(static_cast<std::size_t>(*st.lower_gamma_prime)).strip_index = st.j;
  }
  out.census = take_census(out.strips);
  return out;
}

bool share_one_point(const TracedCurve& a, const TracedCurve& b) {
  for (const auto& x : a.terminals) {
    for (const auto& y : b.terminals) {
      if (x && y && std::abs(*x - *y) < 1e-6) return true;
    }
  }
  return false;
}

std::vector<int> gamma_curves_above_first_zero(const ScanResult& scan) {
  std::vector<int> out;
  if (scan.zeros.empty() || !scan.zeros.front().owning_curve) return out;
  const TracedCurve* first = find_curve(scan.atlas, *scan.zeros.front().owning_curve);
  if (!first) return out;
  for (const auto& c : scan.atlas.curves) {
    if (c.kind.tag() != CurveTag::PreimageBelowOne || c.samples.empty()) continue;
    if (c.id == first->id || above_curve(c.samples[c.samples.size() / 2].s, *first)) out.push_back(c.id);
  }
  return out;
}

std::vector<CheckResult> verify_suite(const ScanResult& scan, const RunConfig& cfg) {
  std::vector<CheckResult> out;
  const auto& curves = scan.atlas.curves;
  const double tol = cfg.trace.corrector_tol;
  const Rect box = cfg.region.box();

  {
    std::size_t bad = 0, total = 0;
    double worst = 0.0;
    for (const auto& c : curves) {
      for (const auto& s : c.samples) {
        const double r = c.kind.real_axis() ? std::abs(s.z.imag()) : std::abs(std::abs(s.z) - *c.kind.radius());
        worst = std::max(worst, r);
        ++total;
        if (!(r < tol)) ++bad;
      }
    }
    out.push_back({"level_fidelity", bad == 0,
                   std::to_string(total) + " samples, max residual " + fmt_short(worst) + ", violations " + std::to_string(bad)});
  }
  {
    std::size_t bad = 0;
    for (const auto& c : curves) {
      for (const auto& s : c.samples) {
        if (c.kind.tag() == CurveTag::PreimageBelowOne && !(s.z.real() < 1.0)) ++bad;
        if (c.kind.tag() == CurveTag::PreimageAboveOne && !(s.z.real() > 1.0)) ++bad;
      }
    }
    out.push_back({"sign_class_purity", bad == 0, std::to_string(bad) + " samples on the wrong side of 1"});
  }
  {
    double best = std::numeric_limits<double>::infinity();
    int ba = -1, bb = -1, partners = 0;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      if (!curves[i].kind.real_axis()) continue;
      for (std::size_t j = i + 1; j < curves.size(); ++j) {
        if (!curves[j].kind.real_axis()) continue;
        if (share_one_point(curves[i], curves[j])) {
          ++partners;
          continue;
        }
        const double d = curve_min_distance(curves[i], curves[j]);
        if (d < best) {
          best = d;
          ba = curves[i].id;
          bb = curves[j].id;
        }
      }
    }
    const double sep = 10.0 * cfg.trace.max_step;
    std::string detail = "min distance " + (std::isfinite(best) ? fmt_short(best) : std::string("n/a"));
    if (ba >= 0) detail += " (curves " + std::to_string(ba) + "," + std::to_string(bb) + ")";
    detail += "; " + std::to_string(partners) + " pairs meeting at a one-point excluded";
    detail += std::string("; 10*max_step separation ") + (!(best <= sep) ? "met" : "NOT met");
    out.push_back({"non_intersection", !(best <= 1e3 * tol), detail});
  }
  {
    std::size_t checked = 0, bad = 0;
    for (const auto& st : scan.strips) {
      if (st.partial) continue;
      std::vector<int> ids = {*st.lower_gamma_prime, *st.upper_gamma_prime};
      if (st.principal) ids.push_back(*st.principal);
      for (const int id : ids) {
        const TracedCurve* c = find_curve(scan.atlas, id);
        const auto r = c ? right_end_sample(*c) : std::nullopt;
        ++checked;
        if (!r || r->s.real() < std::min(8.0, box.sigma_max) ||
            std::abs(r->z - 1.0) > 2.0 * std::exp2(-r->s.real())) {
          ++bad;
        }
      }
    }
    out.push_back({"rightward_escape", bad == 0, std::to_string(checked) + " boundary/principal curves, " +
                                                     std::to_string(bad) + " without a right tail"});
  }
  {
    std::map<int, int> owned;
    int unowned = 0;
    for (const auto& z : scan.zeros) {
      if (z.owning_curve) ++owned[*z.owning_curve];
      else ++unowned;
    }
    // A curve cut by the top or bottom edge may have its zero outside the box.
    const auto cut = [&](const TracedCurve& c) {
      for (const auto* p : {&c.samples.front(), &c.samples.back()}) {
        if (std::abs(p->s.imag() - box.t_min) < 1e-9 || std::abs(p->s.imag() - box.t_max) < 1e-9) return true;
      }
      return false;
    };
    const auto r1 = gamma_curves_above_first_zero(scan);
    int bad = 0, truncated = 0;
    for (const int id : r1) {
      const bool is_cut = cut(*find_curve(scan.atlas, id));
      truncated += is_cut ? 1 : 0;
      const auto it = owned.find(id);
      const int n = it == owned.end() ? 0 : it->second;
      if (n != 1 && !(is_cut && n == 0)) ++bad;
    }
    for (const auto& [id, n] : owned) {
      if (n != 1) ++bad;
    }
    out.push_back({"one_zero_per_gamma", bad == 0 && unowned == 0,
                   std::to_string(r1.size()) + " Gamma curves from the first zero upward (" + std::to_string(truncated) +
                       " cut by the box), " + std::to_string(bad) + " without exactly one zero, " +
                       std::to_string(unowned) + " zeros off the curves"});
  }
  {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : curves) {
      if (c.kind.tag() != CurveTag::PreimageAboveOne) continue;
      for (const auto& z : scan.zeros) best = std::min(best, point_curve_distance(z.s(), c));
    }
    out.push_back({"no_zero_on_gamma_prime", !(best <= 1e-6),
                   "min zero-to-Gamma' distance " + (std::isfinite(best) ? fmt_short(best) : std::string("n/a"))});
  }
  {
    double min_d = std::numeric_limits<double>::infinity();
    int bad = 0, n = 0;
    for (const auto& c : curves) {
      if (c.kind.tag() != CurveTag::PreimageAboveOne) continue;
      const auto rep = check_no_branch_on_gamma_prime(c, cfg.trace.eval);
      ++n;
      min_d = std::min(min_d, rep.min_abs_zeta_prime);
      if (!rep.pass) ++bad;
    }
    out.push_back({"gamma_prime_no_branch", bad == 0,
                   std::to_string(n) + " Gamma' curves, min |zeta'| " +
                       (std::isfinite(min_d) ? fmt_short(min_d) : std::string("n/a")) + ", " + std::to_string(bad) +
                       " failing"});
  }
  {
    const RectRegion region = zero_region(cfg);
    int expected = 0;
    if (region.valid()) {
      expected = argument_principle_count(region, cfg.trace.eval) + (region.contains(Complex(1.0, 0.0)) ? 1 : 0);
    }
    const int found = static_cast<int>(scan.zeros.size());
    out.push_back({"zero_count_matches_argument_principle", found == expected,
                   std::to_string(found) + " located, " + std::to_string(expected) + " by the argument principle"});
  }
  {
    int bad = 0;
    for (const auto& z : scan.zeros) {
      if (z.local_order != 1) ++bad;
    }
    out.push_back({"local_order_one", bad == 0, std::to_string(bad) + " zeros with local order != 1"});
  }
  {
    const auto rep = check_critical_line(scan.zeros, cfg.line_tol, cfg.trace.eval);
    out.push_back({"critical_line", rep.pass,
                   "max |sigma - 1/2| " + fmt_short(rep.max_deviation) + ", max |zeta(1 - conj s)| " +
                       fmt_short(rep.max_pair_residual)});
  }
  {
    const double gap = cfg.gap_tol.value_or(default_gap_tol(cfg.region.t_hi));
    const auto rep = check_distinct_ordinates(scan.zeros, gap);
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < scan.zeros.size(); ++i) min_gap = std::min(min_gap, scan.zeros[i + 1].t - scan.zeros[i].t);
    out.push_back({"distinct_ordinates", rep.pass,
                   std::to_string(scan.zeros.size()) + " zeros, gap_tol " + fmt_short(gap) + ", min gap " +
                       (std::isfinite(min_gap) ? fmt_short(min_gap) : std::string("n/a")) + ", " +
                       std::to_string(rep.offending.size()) + " offending pairs"});
  }
  {
    int n = 0, bad = 0;
    for (const auto& st : scan.strips) {
      if (st.partial) continue;
      ++n;
      if (!verify_lemma1(st, curves, box.sigma_max).pass) ++bad;
    }
    out.push_back({"lemma1_unique_principal", bad == 0,
                   std::to_string(n) + " complete strips, " + std::to_string(bad) + " failing"});
  }
  {
    int n = 0, bad = 0;
    std::string angles;
    TraceConfig tc = cfg.trace;
    tc.domain_box = box;
    for (const auto& st : scan.strips) {
      if (st.partial || n >= cfg.lemma2_strips) continue;
      ++n;
      Lemma2Report rep;
      try {
        rep = verify_lemma2(st, curves, cfg.lemma2_probes, tc);
      } catch (const Error&) {
        rep.pass = false;
      }
      if (!rep.pass) ++bad;
      angles += " j=" + std::to_string(st.j) + ":";
      for (const double a : rep.angles) angles += " " + fmt_short(a);
    }
    out.push_back({"lemma2_asymptotic_tangency", bad == 0,
                   std::to_string(n) + " strips, " + std::to_string(bad) + " failing;" + angles});
  }
  {
    std::size_t assigned = 0;
    int outside = 0;
    for (const auto& st : scan.strips) {
      assigned += st.zeros.size();
      if (st.partial) continue;
      for (const std::size_t zi : st.zeros) {
        const double t = scan.zeros[zi].t;
        if (!st.t_lower || !st.t_upper || !(t > *st.t_lower && t < *st.t_upper)) ++outside;
      }
    }
    out.push_back({"strip_partition", assigned == scan.zeros.size() && outside == 0,
                   std::to_string(assigned) + "/" + std::to_string(scan.zeros.size()) + " zeros assigned, " +
                       std::to_string(outside) + " outside their strip's t-extent"});
  }
  {
    const Census& c = scan.census;
    std::string hist;
    for (const auto& [m, n] : c.histogram) hist += " m" + std::to_string(m) + "=" + std::to_string(n);
    out.push_back({"census", c.consistent(),
                   "sum m_type " + std::to_string(c.sum_m_type) + ", zeros in complete strips " +
                       std::to_string(c.zeros_in_complete) + ";" + hist});
  }
  {
    int bad = 0, n = 0;
    for (const auto& st : scan.strips) {
      if (st.partial) continue;
      ++n;
      if (st.one_points_missing || static_cast<int>(st.one_points.size()) != st.m_type - 1) {
        ++bad;
        continue;
      }
      for (const Complex p : st.one_points) {
        if (!(std::abs(eval_zeta_pair(p, cfg.trace.eval).value - 1.0) < 1e-10)) ++bad;
      }
    }
    out.push_back({"one_point_count", bad == 0, std::to_string(n) + " complete strips, " + std::to_string(bad) + " failing"});
  }
  return out;
}

std::vector<ZeroRecord> mirror_zeros(std::span<const ZeroRecord> zeros) {
  std::vector<ZeroRecord> out(zeros.begin(), zeros.end());
  for (auto& z : out) z.t = -z.t;
  std::sort(out.begin(), out.end(), [](const ZeroRecord& a, const ZeroRecord& b) { return a.t < b.t; });
  return out;
}

std::vector<TracedCurve> mirror_curves(std::span<const TracedCurve> curves) {
  std::vector<TracedCurve> out;
  out.reserve(curves.size());
  for (const auto& c : curves) out.push_back(mirror(c));
  return out;
}

}  // namespace zatlas
