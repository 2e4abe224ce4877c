#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "zatlas/error.hpp"
#include "zatlas/strip_topology.hpp"

using zatlas::Complex;
using zatlas::ErrorCode;
using zatlas::StripRecord;

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

std::vector<const StripRecord*> complete(const std::vector<StripRecord>& strips) {
  std::vector<const StripRecord*> out;
  for (const auto& s : strips)
    if (!s.partial) out.push_back(&s);
  return out;
}

const StripRecord& first_of_type(const std::vector<StripRecord>& strips, int m) {
  for (const auto& s : strips)
    if (!s.partial && s.m_type == m) return s;
  FAIL("no strip of the requested type");
  return strips.front();
}

}  // namespace

TEST_CASE("strips partition the zeros of t in (10, 60)") {
  zatlas::RunConfig cfg;
  cfg.region.t_lo = 10.0;
  const auto scan = zatlas::run_scan(cfg);
  std::vector<int> hits(scan.zeros.size(), 0);
  for (const auto& s : scan.strips)
    for (const auto i : s.zeros) ++hits[i];
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  for (std::size_t i = 0; i < scan.zeros.size(); ++i) {
    int inside = 0;
    for (const auto& s : scan.strips) inside += zatlas::in_strip(scan.zeros[i].s(), s, scan.atlas.curves) ? 1 : 0;
    CAPTURE(i);
    CHECK(inside == 1);
  }
  for (const auto* s : complete(scan.strips)) CHECK(s->principal.has_value());
}

TEST_CASE("strips of t in (0, 60)") {
  const auto& scan = fixture::scan60();
  const auto full = complete(scan.strips);
  REQUIRE(full.size() >= 5);

  const auto first = std::find_if(scan.strips.begin(), scan.strips.end(), [&](const StripRecord& s) {
    return std::any_of(s.zeros.begin(), s.zeros.end(), [&](std::size_t i) { return std::abs(scan.zeros[i].t - 14.13) < 0.01; });
  });
  REQUIRE(first != scan.strips.end());
  CHECK(first->m_type == 1);
  CHECK(first->zeros.size() == 1);
  CHECK(zatlas::classify_m_type(*first) == 1);

  for (std::size_t k = 0; k + 1 < full.size(); ++k) CHECK(full[k]->j + 1 == full[k + 1]->j);

  for (const auto* s : full) {
    CAPTURE(s->j);
    CHECK(s->gamma_components.size() == s->zeros.size());
    CHECK(s->principal.has_value());
    CHECK(s->gamma_components.front() == *s->principal);
    CHECK(static_cast<int>(s->one_points.size()) == s->m_type - 1);
    CHECK_FALSE(s->inconsistent);
    REQUIRE(s->t_lower);
    REQUIRE(s->t_upper);
    for (const auto i : s->zeros) {
      CHECK(scan.zeros[i].t > *s->t_lower);
      CHECK(scan.zeros[i].t < *s->t_upper);
    }
  }
}

TEST_CASE("m-type") {
  const auto& scan = fixture::scan60();
  CHECK(zatlas::classify_m_type(first_of_type(scan.strips, 2)) == 2);

  StripRecord synthetic;
  synthetic.gamma_components = {4, 7, 9};
  synthetic.zeros = {0, 1, 2};
  CHECK(zatlas::classify_m_type(synthetic) == 3);
  synthetic.zeros.pop_back();
  CHECK(code_of([&] { zatlas::classify_m_type(synthetic); }) == ErrorCode::InconsistentStrip);
}

TEST_CASE("one-points") {
  const auto& scan = fixture::scan60();
  const auto& curves = scan.atlas.curves;
  CHECK(zatlas::locate_one_points(first_of_type(scan.strips, 1), curves).one_points.empty());

  for (const int m : {2, 3}) {
    const auto& s = first_of_type(scan.strips, m);
    const auto pts = zatlas::locate_one_points(s, curves);
    REQUIRE(static_cast<int>(pts.one_points.size()) == m - 1);
    REQUIRE(static_cast<int>(pts.minus_one_points.size()) == m - 1);
    for (const auto& p : pts.one_points) {
      CHECK(std::abs(zatlas::eval_zeta(p).value - 1.0) < 1e-10);
      CHECK(zatlas::in_strip(p, s, curves));
    }
    for (const auto& p : pts.minus_one_points) {
      CHECK(std::abs(zatlas::eval_zeta(p).value + 1.0) < 1e-10);
      CHECK(zatlas::in_strip(p, s, curves));
    }
  }
}

TEST_CASE("Lemma 1") {
  const auto& scan = fixture::scan60();
  const auto full = complete(scan.strips);
  for (std::size_t k = 0; k < 5; ++k) {
    const auto rep = zatlas::verify_lemma1(*full[k], scan.atlas.curves, 10.0);
    CAPTURE(full[k]->j);
    CHECK(rep.pass);
    CHECK(rep.principal_candidates == 1);
    CHECK(rep.max_tail_ratio <= 1.0);
    const auto& principal = scan.atlas.curve(*full[k]->principal);
    const auto at10 = zatlas::t_at_sigma(principal, 10.0);
    REQUIRE(at10);
    CHECK(std::abs(zatlas::eval_zeta({10.0, *at10}).value - 1.0) < std::pow(2.0, -9.0));
  }

  StripRecord doubled = *full[0];
  doubled.gamma_components.push_back(*full[1]->principal);
  CHECK_FALSE(zatlas::verify_lemma1(doubled, scan.atlas.curves, 10.0).pass);
}

TEST_CASE("Lemma 2") {
  const auto& scan = fixture::scan60();
  const auto& cfg = fixture::trace60();
  const std::vector<double> probes{5.0, 10.0, 15.0};
  const auto full = complete(scan.strips);
  for (std::size_t k = 0; k < 5; ++k) {
    const auto rep = zatlas::verify_lemma2(*full[k], scan.atlas.curves, probes, cfg);
    CAPTURE(full[k]->j);
    CHECK(rep.pass);
    REQUIRE(rep.angles.size() == 3);
    CHECK(rep.angles[0] > rep.angles[1]);
    CHECK(rep.angles[1] > rep.angles[2]);
    CHECK(rep.angles[2] < 0.05);
  }

  const auto wide = zatlas::extend_right(scan.atlas.curve(*full[0]->lower_gamma_prime), 16.0, cfg);
  for (const double a : zatlas::lemma2_angles(wide, wide, probes)) CHECK(a == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(code_of([&] { zatlas::lemma2_angles(scan.atlas.curve(*full[0]->lower_gamma_prime), wide, std::vector<double>{40.0}); }) ==
        ErrorCode::ParamNotAttained);
}

TEST_CASE("census") {
  const auto& scan = fixture::scan60();
  const auto c = zatlas::take_census(scan.strips);
  CHECK(c.consistent());
  CHECK(c.zeros_total == static_cast<int>(scan.zeros.size()));
  CHECK(c.zeros_in_complete + c.zeros_in_partial == c.zeros_total);
  int strips = 0;
  for (const auto& [m, n] : c.histogram) strips += n;
  CHECK(strips == static_cast<int>(complete(scan.strips).size()));
  REQUIRE(c.first_multi_j);
  CHECK(*c.first_multi_j == first_of_type(scan.strips, 2).j);
  REQUIRE(c.first_multi_t_range);
  CHECK(c.first_multi_t_range->first < c.first_multi_t_range->second);
}

TEST_CASE("two principal candidates") {
  const auto& scan = fixture::scan60();
  auto curves = scan.atlas.curves;
  const auto full = complete(scan.strips);
  auto twin = scan.atlas.curve(*full[1]->principal);
  twin.id = static_cast<int>(curves.size());
  for (auto& smp : twin.samples) smp.s += Complex(0.0, 0.01);
  curves.push_back(twin);
  CHECK(code_of([&] { zatlas::assemble_strips(curves, scan.zeros, scan.atlas.box); }) ==
        ErrorCode::AmbiguousPrincipal);
}

TEST_CASE("point-in-curve tests") {
  const auto& scan = fixture::scan60();
  const auto& s = first_of_type(scan.strips, 1);
  const auto& lower = scan.atlas.curve(*s.lower_gamma_prime);
  const auto& upper = scan.atlas.curve(*s.upper_gamma_prime);
  const Complex mid(0.5, 0.5 * (*s.t_lower + *s.t_upper));
  CHECK(zatlas::above_curve(mid, lower));
  CHECK_FALSE(zatlas::above_curve(mid, upper));
  CHECK(zatlas::in_strip(mid, s, scan.atlas.curves));
  // Far to the right the bounding curves are extended horizontally.
  CHECK(zatlas::in_strip(Complex(50.0, mid.imag()), s, scan.atlas.curves) ==
        zatlas::in_strip(Complex(9.9, mid.imag()), s, scan.atlas.curves));
}
