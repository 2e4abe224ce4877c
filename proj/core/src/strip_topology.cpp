#include "zatlas/strip_topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zatlas/error.hpp"

namespace zatlas {
namespace {

const TracedCurve& by_id(std::span<const TracedCurve> curves, int id) {
  const auto idx = static_cast<std::size_t>(id);
  if (id >= 0 && idx < curves.size() && curves[idx].id == id) return curves[idx];
  for (const auto& c : curves) {
    if (c.id == id) return c;
  }
  throw Error(ErrorCode::NotFound, "no curve with id " + std::to_string(id));
}

std::optional<CurveSample> right_end(const TracedCurve& c) {
  if (c.samples.empty()) return std::nullopt;
  if (c.ends[0] == EndKind::EscapesRight) return c.samples.front();
  if (c.ends[1] == EndKind::EscapesRight) return c.samples.back();
  return std::nullopt;
}

// Runs from the right edge to the left edge of the box.
bool spans_box(const TracedCurve& c, const Rect& box) {
  if (c.samples.empty()) return false;
  const bool front_right = c.ends[0] == EndKind::EscapesRight;
  const bool back_right = c.ends[1] == EndKind::EscapesRight;
  if (front_right == back_right) return false;
  const CurveSample& other = front_right ? c.samples.back() : c.samples.front();
  const EndKind other_end = front_right ? c.ends[1] : c.ends[0];
  return other_end == EndKind::EscapesDomain && std::abs(other.s.real() - box.sigma_min) < 1e-9;
}

int crossings_below(Complex p, Complex a, Complex b) {
  if ((a.real() <= p.real()) == (b.real() <= p.real())) return 0;
  const double f = (p.real() - a.real()) / (b.real() - a.real());
  const double t = a.imag() + f * (b.imag() - a.imag());
  return t < p.imag() ? 1 : 0;
}

Complex solve_level(Complex seed, Complex target, const EvalConfig& cfg, double& residual) {
  Complex s = seed;
  residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    const auto p = eval_zeta_pair(s, cfg);
    residual = std::abs(p.value - target);
    if (residual < 1e-12 || !is_finite(p.value)) break;
    Complex step = (p.value - target) / p.deriv;
    // Keep early steps short; the basin around a one-point is small.
    if (std::abs(step) > 0.25) step *= 0.25 / std::abs(step);
    s -= step;
    if (std::abs(step) < 1e-15) {
      residual = std::abs(eval_zeta_pair(s, cfg).value - target);
      break;
    }
  }
  return s;
}

}  // namespace

bool above_curve(Complex p, const TracedCurve& c) {
  int n = 0;
  for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) n += crossings_below(p, c.samples[i].s, c.samples[i + 1].s);
  if (const auto r = right_end(c)) n += crossings_below(p, r->s, r->s + 1e6);
  return n % 2 == 1;
}

bool in_strip(Complex p, const StripRecord& strip, std::span<const TracedCurve> curves) {
  if (strip.lower_gamma_prime && !above_curve(p, by_id(curves, *strip.lower_gamma_prime))) return false;
  if (strip.upper_gamma_prime && above_curve(p, by_id(curves, *strip.upper_gamma_prime))) return false;
  return true;
}

std::optional<double> t_at_sigma(const TracedCurve& c, double sigma_probe) {
  for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
    const Complex a = c.samples[i].s, b = c.samples[i + 1].s;
    const double da = a.real() - sigma_probe, db = b.real() - sigma_probe;
    if (da == 0.0 || (da < 0.0) != (db < 0.0)) {
      const double f = da == 0.0 ? 0.0 : da / (da - db);
      return a.imag() + f * (b.imag() - a.imag());
    }
  }
  if (!c.samples.empty() && c.samples.back().s.real() == sigma_probe) return c.samples.back().s.imag();
  return std::nullopt;
}

bool satisfies_tail_bound(const TracedCurve& c, double sigma_max) {
  if (!c.escapes_right()) return false;
  bool any = false;
  for (const auto& smp : c.samples) {
    const double sigma = smp.s.real();
    if (sigma < 3.0 || sigma > sigma_max) continue;
    any = true;
    if (std::abs(smp.z - 1.0) > 2.0 * std::exp2(-sigma)) return false;
  }
  return any;
}

int classify_m_type(const StripRecord& strip) {
  const int m = static_cast<int>(strip.gamma_components.size());
  if (m != static_cast<int>(strip.zeros.size())) {
    throw Error(ErrorCode::InconsistentStrip, "strip " + std::to_string(strip.j) + ": " + std::to_string(m) +
                                                  " components, " + std::to_string(strip.zeros.size()) + " zeros");
  }
  return m;
}

OnePoints locate_one_points(const StripRecord& strip, std::span<const TracedCurve> curves, const EvalConfig& cfg) {
  OnePoints out;
  for (const int id : strip.gamma_components) {
    if (strip.principal && id == *strip.principal) continue;
    const TracedCurve& c = by_id(curves, id);
    if (c.samples.empty()) throw Error(ErrorCode::NotFound, "empty component");

    // zeta -> 1 end: the recorded terminal, else the sample with largest Re zeta.
    std::vector<Complex> seeds;
    for (const auto& t : c.terminals) {
      if (t) seeds.push_back(*t);
    }
    const auto top = std::max_element(c.samples.begin(), c.samples.end(),
                                      [](const CurveSample& a, const CurveSample& b) { return a.z.real() < b.z.real(); });
    seeds.push_back(top->s);
    std::optional<Complex> one;
    for (const Complex seed : seeds) {
      double res = 0.0;
      const Complex s = solve_level(seed, 1.0, cfg, res);
      if (res < 1e-10 && in_strip(s, strip, curves)) {
        one = s;
        break;
      }
    }
    if (!one) throw Error(ErrorCode::NotFound, "no one-point for component " + std::to_string(id));
    out.one_points.push_back(*one);

    std::optional<Complex> minus;
    for (std::size_t i = 0; i + 1 < c.samples.size() && !minus; ++i) {
      const double a = c.samples[i].z.real() + 1.0, b = c.samples[i + 1].z.real() + 1.0;
      if (!(a == 0.0 || (a < 0.0) != (b < 0.0))) continue;
      const double f = a == 0.0 ? 0.0 : a / (a - b);
      double res = 0.0;
      const Complex s = solve_level(c.samples[i].s + f * (c.samples[i + 1].s - c.samples[i].s), -1.0, cfg, res);
      if (res < 1e-10 && in_strip(s, strip, curves)) minus = s;
    }
    if (!minus) throw Error(ErrorCode::NotFound, "no zeta = -1 point on component " + std::to_string(id));
    out.minus_one_points.push_back(*minus);
  }
  return out;
}

std::vector<StripRecord> assemble_strips(std::span<const TracedCurve> curves, std::span<const ZeroRecord> zeros,
                                         const Rect& box, const EvalConfig& cfg) {
  std::vector<std::pair<double, int>> bounds;
  for (const auto& c : curves) {
    if (c.kind.tag() != CurveTag::PreimageAboveOne) continue;
    if (const auto r = right_end(c)) bounds.emplace_back(r->s.imag(), c.id);
  }
  std::sort(bounds.begin(), bounds.end());

  std::vector<StripRecord> strips(bounds.size() + 1);
  for (std::size_t k = 0; k < strips.size(); ++k) {
    StripRecord& st = strips[k];
    st.j = static_cast<int>(k);
    if (k > 0) st.lower_gamma_prime = bounds[k - 1].second;
    if (k < bounds.size()) st.upper_gamma_prime = bounds[k].second;
    st.partial = !st.lower_gamma_prime || !st.upper_gamma_prime ||
                 !spans_box(by_id(curves, *st.lower_gamma_prime), box) ||
                 !spans_box(by_id(curves, *st.upper_gamma_prime), box);
    if (st.lower_gamma_prime) st.t_lower = t_at_sigma(by_id(curves, *st.lower_gamma_prime), 0.5);
    if (st.upper_gamma_prime) st.t_upper = t_at_sigma(by_id(curves, *st.upper_gamma_prime), 0.5);
  }

  auto owner = [&](Complex p) -> StripRecord& {
    StripRecord* hit = nullptr;
    for (auto& st : strips) {
      if (!in_strip(p, st, curves)) continue;
      if (hit) throw Error(ErrorCode::OrphanComponent, "point lies in two strips");
      hit = &st;
    }
    if (!hit) throw Error(ErrorCode::OrphanComponent, "point fits no strip");
    return *hit;
  };

  for (const auto& c : curves) {
    if (c.samples.empty()) continue;
    const Complex rep = c.samples[c.samples.size() / 2].s;
    if (c.kind.tag() == CurveTag::PreimageBelowOne) {
      owner(rep).gamma_components.push_back(c.id);
    } else if (c.kind.tag() == CurveTag::PreimageAboveOne && !right_end(c)) {
      owner(rep).gamma_prime_pieces.push_back(c.id);
    }
  }
  for (std::size_t i = 0; i < zeros.size(); ++i) owner(zeros[i].s()).zeros.push_back(i);

  for (auto& st : strips) {
    std::vector<int> candidates;
    for (const int id : st.gamma_components) {
      if (satisfies_tail_bound(by_id(curves, id), box.sigma_max)) candidates.push_back(id);
    }
    if (candidates.size() == 1) {
      st.principal = candidates.front();
    } else if (!st.partial) {
      throw Error(ErrorCode::AmbiguousPrincipal, "strip " + std::to_string(st.j) + " has " +
                                                     std::to_string(candidates.size()) + " principal candidates");
    }
    // Principal first, the others by the ordinate of their midpoint sample.
    auto key = [&](int id) {
      const TracedCurve& c = by_id(curves, id);
      return std::make_pair(st.principal && id == *st.principal ? 0 : 1, c.samples[c.samples.size() / 2].s.imag());
    };
    std::sort(st.gamma_components.begin(), st.gamma_components.end(), [&](int a, int b) { return key(a) < key(b); });
    std::sort(st.zeros.begin(), st.zeros.end(), [&](std::size_t a, std::size_t b) { return zeros[a].t < zeros[b].t; });

    try {
      st.m_type = classify_m_type(st);
    } catch (const Error&) {
      st.m_type = static_cast<int>(st.gamma_components.size());
      st.inconsistent = true;
    }
    if (!st.partial) {
      try {
        auto pts = locate_one_points(st, curves, cfg);
        st.one_points = std::move(pts.one_points);
        st.minus_one_points = std::move(pts.minus_one_points);
      } catch (const Error&) {
        st.one_points_missing = true;
      }
    }
  }
  return strips;
}

Lemma1Report verify_lemma1(const StripRecord& strip, std::span<const TracedCurve> curves, double sigma_max) {
  Lemma1Report rep;
  for (const int id : strip.gamma_components) {
    const TracedCurve& c = by_id(curves, id);
    if (satisfies_tail_bound(c, sigma_max)) {
      ++rep.principal_candidates;
      for (const auto& smp : c.samples) {
        if (smp.s.real() >= 3.0 && smp.s.real() <= sigma_max) {
          rep.max_tail_ratio = std::max(rep.max_tail_ratio, std::abs(smp.z - 1.0) / (2.0 * std::exp2(-smp.s.real())));
        }
      }
    } else if (c.escapes_right()) {
      ++rep.other_right_escapes;
    }
  }
  rep.pass = rep.principal_candidates == 1 && rep.other_right_escapes == 0;
  return rep;
}

std::vector<double> lemma2_angles(const TracedCurve& a, const TracedCurve& b, std::span<const double> probe_sigmas) {
  std::vector<double> out;
  for (const double sigma : probe_sigmas) {
    const auto z = value_at_sigma(a, sigma);
    if (!z) throw Error(ErrorCode::ParamNotAttained, "curve does not reach sigma = " + std::to_string(sigma));
    out.push_back(tangent_angle_between(a, b, *z));
  }
  return out;
}

Lemma2Report verify_lemma2(const StripRecord& strip, std::span<const TracedCurve> curves,
                           std::span<const double> probe_sigmas, const TraceConfig& cfg) {
  Lemma2Report rep;
  if (!strip.lower_gamma_prime || !strip.upper_gamma_prime || probe_sigmas.empty()) return rep;
  const double reach = *std::max_element(probe_sigmas.begin(), probe_sigmas.end()) + 1.0;
  auto widened = [&](int id) {
    const TracedCurve& c = by_id(curves, id);
    double right = -std::numeric_limits<double>::infinity();
    for (const auto& smp : c.samples) right = std::max(right, smp.s.real());
    return right >= reach ? c : extend_right(c, reach, cfg);
  };
  const TracedCurve lo = widened(*strip.lower_gamma_prime);
  const TracedCurve hi = widened(*strip.upper_gamma_prime);
  rep.angles = lemma2_angles(lo, hi, probe_sigmas);
  rep.pass = rep.angles.back() < 0.05;
  for (std::size_t i = 1; i < rep.angles.size(); ++i) {
    if (!(rep.angles[i] < rep.angles[i - 1])) rep.pass = false;
  }
  return rep;
}

Census take_census(std::span<const StripRecord> strips) {
  Census c;
  for (const auto& st : strips) {
    const int nz = static_cast<int>(st.zeros.size());
    c.zeros_total += nz;
    if (st.partial) {
      c.zeros_in_partial += nz;
      continue;
    }
    ++c.histogram[st.m_type];
    c.sum_m_type += st.m_type;
    c.zeros_in_complete += nz;
    if (st.m_type >= 2 && !c.first_multi_j) {
      c.first_multi_j = st.j;
      if (st.t_lower && st.t_upper) c.first_multi_t_range = std::make_pair(*st.t_lower, *st.t_upper);
    }
  }
  return c;
}

}  // namespace zatlas
