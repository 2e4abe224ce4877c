// Acceptance run: one PASS/FAIL line per criterion. Exit status is 0 when
// every failure is a documented deviation (see README).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "oracle.hpp"
#include "reference_values.hpp"
#include "zatlas/pipeline.hpp"

using namespace zatlas;

namespace {

struct Verdict {
  int id;
  std::string title;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Verdict> verdicts;
const std::set<int> kKnownDeviations{7};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion(int id, const std::string& title, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string detail;
  try {
    std::tie(pass, detail) = body();
  } catch (const std::exception& e) {
    pass = false;
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  verdicts.push_back({id, title, pass, detail, secs});
  std::printf("%s %d %s: %s [%.2f s]\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str(), secs);
  std::fflush(stdout);
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunConfig box(double t_hi) {
  RunConfig cfg;
  cfg.region.t_hi = t_hi;
  return cfg;
}

const ScanResult& scan60() {
  static const ScanResult s = run_scan(box(60.0));
  return s;
}

std::vector<const StripRecord*> complete_strips(const ScanResult& s) {
  std::vector<const StripRecord*> out;
  for (const auto& st : s.strips)
    if (!st.partial) out.push_back(&st);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  criterion(1, "evaluation accuracy", [] {
    const double direct = oracle::zeta_direct(2.0);
    const auto table = build_stieltjes_table(15, 100000);
    double laurent0 = -1.0, inv_fact = 1.0;
    for (std::size_t n = 0; n < table.size(); ++n) {
      laurent0 += table[n].gamma_n * inv_fact;
      inv_fact /= static_cast<double>(n + 1);
    }
    const auto t0 = std::chrono::steady_clock::now();
    const double e2 = std::abs(eval_zeta({2.0, 0.0}).value - direct);
    const double e0 = std::abs(eval_zeta({0.0, 0.0}).value - laurent0);
    const double secs = elapsed_since(t0);
    const double pi2 = std::abs(direct - std::numbers::pi * std::numbers::pi / 6.0);
    return std::pair{e2 < 1e-10 && e0 < 1e-10 && std::abs(laurent0 + 0.5) < 1e-10 && secs < 1.0,
                     fmt("|zeta(2) - oracle| = %.2e (oracle vs pi^2/6 %.1e), |zeta(0) - oracle| = %.2e "
                         "(oracle vs -1/2 %.1e), eval time %.3g s",
                         e2, pi2, e0, std::abs(laurent0 + 0.5), secs)};
  });

  criterion(2, "functional equation", [] {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    int n = 0;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 10; ++j) {
        const Complex s(-3.0 + 7.0 * i / 19.0, 0.5 + 39.5 * j / 9.0);
        worst = std::max(worst, std::abs(eval_zeta(s).value - reflection_rhs(s).value));
        ++n;
      }
    }
    const double secs = elapsed_since(t0);
    return std::pair{worst < 1e-8 && secs < 10.0 && n == 200,
                     fmt("%d grid points, max residual %.2e", n, worst)};
  });

  criterion(3, "conjugate symmetry and trivial zeros", [] {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> sig(-3.0, 4.0), tt(0.5, 40.0);
    double sym = 0.0;
    for (int i = 0; i < 500; ++i) {
      const Complex s(sig(rng), tt(rng));
      sym = std::max(sym, std::abs(eval_zeta(std::conj(s)).value - std::conj(eval_zeta(s).value)));
    }
    double triv = 0.0;
    for (int m = 1; m <= 10; ++m) triv = std::max(triv, std::abs(eval_zeta({-2.0 * m, 0.0}).value));
    return std::pair{sym < 1e-12 && triv < 1e-10,
                     fmt("500 random points, max asymmetry %.2e; max |zeta(-2m)| for m <= 10: %.2e", sym, triv)};
  });

  criterion(4, "Stieltjes constants", [] {
    const auto hi = oracle::stieltjes_high_cutoff(1);
    const auto g0 = eval_stieltjes(0, 1000000);
    const auto g1 = eval_stieltjes(1, 1000000);
    const double d0 = std::abs(g0.gamma_n - hi[0]);
    const double d1 = std::abs(g1.gamma_n - hi[1]);
    const auto table = build_stieltjes_table(8, 1000000);
    double annulus = 0.0;
    for (const double r : {0.06, 0.25, 0.5, 0.75, 0.89}) {
      for (int k = 0; k < 16; ++k) {
        const Complex s = 1.0 + std::polar(r, k * std::numbers::pi / 8.0 + 0.05);
        annulus = std::max(annulus, std::abs(eval_zeta_laurent(s, default_stieltjes_table(), 24).value -
                                             eval_zeta_em(s).value));
      }
    }
    const double check125 =
        std::abs(eval_zeta_laurent({1.25, 0.0}, table, 8).value - eval_zeta_em({1.25, 0.0}).value);
    return std::pair{d0 < 1e-6 && d1 < 1e-5 && annulus < 1e-7 && check125 < 1e-7,
                     fmt("gamma_0 %.12f (oracle diff %.1e), gamma_1 %.12f (oracle diff %.1e); Laurent vs direct: "
                         "annulus max %.1e, s = 1.25 with 8 terms %.1e",
                         g0.gamma_n, d0, g1.gamma_n, d1, annulus, check125)};
  });

  std::vector<ZeroRecord> zeros110;
  criterion(5, "zero suite, t in (0, 110)", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig cfg = box(110.0);
    const Atlas atlas = run_trace(cfg);
    zeros110 = run_zeros(cfg, atlas);
    const int ap = argument_principle_count({0.0, 1.0, cfg.region.t_lo, cfg.region.t_hi});
    const double secs = elapsed_since(t0);
    double dev = 0.0, gap = 1e300, ref_err = 0.0;
    int bad_order = 0;
    bool increasing = true;
    for (std::size_t i = 0; i < zeros110.size(); ++i) {
      dev = std::max(dev, std::abs(zeros110[i].sigma - 0.5));
      if (zeros110[i].local_order != 1) ++bad_order;
      if (i > 0) {
        increasing = increasing && zeros110[i].t > zeros110[i - 1].t;
        gap = std::min(gap, zeros110[i].t - zeros110[i - 1].t);
      }
      if (i < ref::kZeroOrdinates.size()) ref_err = std::max(ref_err, std::abs(zeros110[i].t - ref::kZeroOrdinates[i]));
    }
    const bool pass = zeros110.size() >= 30 && dev < 1e-8 && increasing && gap > 0.5 &&
                      static_cast<int>(zeros110.size()) == ap && bad_order == 0 && secs < 120.0;
    return std::pair{pass, fmt("%zu zeros (argument principle %d), max |sigma - 1/2| %.1e, min gap %.4f, "
                               "local order != 1: %d, max |t - reference| %.1e, %.1f s",
                               zeros110.size(), ap, dev, gap, bad_order, ref_err, secs)};
  });

  criterion(6, "distinct ordinates", [&] {
    const auto rep = check_distinct_ordinates(zeros110, 0.5);
    auto planted = zeros110;
    ZeroRecord twin = planted.at(10);
    twin.sigma = 1.0 - twin.sigma + 1e-7;
    planted.insert(planted.begin() + 11, twin);
    const auto dup = check_distinct_ordinates(planted, 0.5);
    return std::pair{rep.pass && !dup.pass && dup.offending.size() == 1,
                     fmt("%zu zeros pass: %s; planted duplicate detected with %zu offending pair(s)", zeros110.size(),
                         rep.pass ? "yes" : "no", dup.offending.size())};
  });

  criterion(7, "atlas topology, t in (0, 60)", [] {
    const auto& s = scan60();
    const double threshold = 10.0 * RunConfig{}.trace.max_step;
    double best = 1e300;
    int ia = -1, ib = -1, excluded = 0;
    for (std::size_t i = 0; i < s.atlas.curves.size(); ++i) {
      for (std::size_t j = i + 1; j < s.atlas.curves.size(); ++j) {
        const auto& a = s.atlas.curves[i];
        const auto& b = s.atlas.curves[j];
        if (share_one_point(a, b)) {
          ++excluded;
          continue;
        }
        const double d = curve_min_distance(a, b);
        if (d < best) {
          best = d;
          ia = a.id;
          ib = b.id;
        }
      }
    }
    std::map<int, int> owned;
    for (const auto& z : s.zeros)
      if (z.owning_curve) ++owned[*z.owning_curve];
    int gamma_bad = 0;
    const auto r1 = gamma_curves_above_first_zero(s);
    for (const int id : r1) gamma_bad += (owned.count(id) && owned[id] == 1) ? 0 : 1;
    double zero_to_gp = 1e300, min_dz = 1e300;
    for (const auto& c : s.atlas.curves) {
      if (c.kind != CurveKind::above_one()) continue;
      for (const auto& z : s.zeros) zero_to_gp = std::min(zero_to_gp, point_curve_distance(z.s(), c));
      for (const auto& smp : c.samples) min_dz = std::min(min_dz, std::abs(eval_zeta_pair(smp.s).deriv));
    }
    const bool sep = best > threshold;
    const bool rest = gamma_bad == 0 && zero_to_gp > 1e-6 && min_dz > 1e-6;
    return std::pair{sep && rest,
                     fmt("min pairwise distance %.4f (curves %d,%d) vs 10*max_step = %.2f: %s; %d one-point pairs "
                         "excluded; %zu Gamma curves from the first zero up, %d without exactly one zero; min "
                         "zero-to-Gamma' distance %.3f; min |zeta'| on Gamma' %.2e",
                         best, ia, ib, threshold, sep ? "met" : "NOT met", excluded, r1.size(), gamma_bad,
                         zero_to_gp, min_dz)};
  });

  criterion(8, "Lemma 1", [] {
    const auto& s = scan60();
    int bad = 0;
    double ratio = 0.0;
    const auto full = complete_strips(s);
    for (const auto* st : full) {
      const auto rep = verify_lemma1(*st, s.atlas.curves, 10.0);
      if (!rep.pass || rep.principal_candidates != 1) ++bad;
      ratio = std::max(ratio, rep.max_tail_ratio);
    }
    return std::pair{bad == 0 && !full.empty(),
                     fmt("%zu complete strips, %d failing; max |zeta - 1| / 2^(1-sigma) on principal tails %.3f",
                         full.size(), bad, ratio)};
  });

  criterion(9, "Lemma 2", [] {
    const auto& s = scan60();
    const std::vector<double> probes{5.0, 10.0, 15.0};
    TraceConfig tc = RunConfig{}.trace;
    tc.domain_box = s.atlas.box;
    const auto full = complete_strips(s);
    std::string angles;
    int bad = 0;
    const std::size_t n = std::min<std::size_t>(5, full.size());
    for (std::size_t k = 0; k < n; ++k) {
      const auto rep = verify_lemma2(*full[k], s.atlas.curves, probes, tc);
      const auto& a = rep.angles;
      const bool ok = a.size() == 3 && a[0] > a[1] && a[1] > a[2] && a[2] < 0.05;
      if (!ok) ++bad;
      angles += fmt(" j=%d:", full[k]->j);
      for (const double x : a) angles += fmt(" %.4g", x);
    }
    return std::pair{bad == 0 && n == 5, fmt("%zu strips, %d failing;%s", n, bad, angles.c_str())};
  });

  criterion(10, "m-type census, t in (0, 300)", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = run_scan(box(300.0));
    const double secs = elapsed_since(t0);
    const auto& c = s.census;
    std::string hist;
    for (const auto& [m, n] : c.histogram) hist += fmt(" m%d=%d", m, n);
    const int expected = static_cast<int>(ref::kZeroOrdinates.size());
    const bool pass = c.consistent() && c.zeros_in_complete + c.zeros_in_partial == c.zeros_total &&
                      c.zeros_total == expected && c.first_multi_j.has_value() && secs < 900.0;
    std::string first = "none";
    if (c.first_multi_j && c.first_multi_t_range) {
      first = fmt("j=%d, t in [%.3f, %.3f]", *c.first_multi_j, c.first_multi_t_range->first,
                  c.first_multi_t_range->second);
    }
    return std::pair{pass, fmt("histogram%s; sum m_type %d = zeros in complete strips %d; %d zeros in the partial "
                               "top strip; %d zeros in total (reference %d); first m >= 2 strip: %s; %.1f s",
                               hist.c_str(), c.sum_m_type, c.zeros_in_complete, c.zeros_in_partial, c.zeros_total,
                               expected, first.c_str(), secs)};
  });

  criterion(11, "determinism", [] {
    namespace fs = std::filesystem;
    std::vector<nlohmann::json> files;
    std::vector<std::string> reports;
    for (const char* tag : {"a", "b"}) {
      const auto dir = fs::temp_directory_path() / (std::string("zatlas_acceptance_") + tag);
      fs::remove_all(dir);
      const std::string out = dir.string();
      const char* argv[] = {"zatlas", "verify", "--t-max", "60", "--out", out.c_str()};
      std::ostringstream o, e;
      const int code = cli::run(6, argv, o, e);
      if (code != cli::kOk && code != cli::kVerificationFailure) return std::pair{false, fmt("verify exited %d", code)};
      files.push_back(nlohmann::json::parse(slurp(dir / "manifest.json")).at("files"));
      reports.push_back(slurp(dir / "report.json"));
    }
    const bool same = files[0] == files[1] && reports[0] == reports[1];
    std::string digests;
    for (const auto& f : files[0]) digests += " " + f.at("name").get<std::string>() + "=" + f.at("sha256").get<std::string>().substr(0, 12);
    return std::pair{same, fmt("two verify runs, digests %s:%s", same ? "identical" : "DIFFER", digests.c_str())};
  });

  int unexpected = 0;
  for (const auto& v : verdicts) {
    if (v.pass) continue;
    if (kKnownDeviations.count(v.id)) {
      std::printf("note: criterion %d fails as documented (known deviation)\n", v.id);
    } else {
      ++unexpected;
    }
  }
  const auto passed = std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  std::printf("%ld/%zu criteria pass, %d unexpected failure(s)\n", static_cast<long>(passed), verdicts.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}
