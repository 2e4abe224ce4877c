#include "zatlas/zeta_eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "zatlas/error.hpp"

namespace zatlas {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// B_{2k} / (2k)!, k = 1..16.
const std::array<double, 16>& bernoulli_over_factorial() {
  static const std::array<double, 16> table = [] {
    const std::array<double, 16> num = {1.0,          -1.0,          1.0,         -1.0,
                                        5.0,          -691.0,        7.0,         -3617.0,
                                        43867.0,      -174611.0,     854513.0,    -236364091.0,
                                        8553103.0,    -23749461029.0, 8615841276005.0, -7709321041217.0};
    const std::array<double, 16> den = {6.0,   30.0,  42.0,  30.0,  66.0,  2730.0, 6.0,   510.0,
                                        798.0, 330.0, 138.0, 2730.0, 6.0,  870.0,  14322.0, 510.0};
    std::array<double, 16> out{};
    double fact = 1.0;
    for (int k = 1; k <= 16; ++k) {
      fact *= static_cast<double>(2 * k - 1) * static_cast<double>(2 * k);
      out[k - 1] = num[k - 1] / den[k - 1] / fact;
    }
    return out;
  }();
  return table;
}

// Neumaier-compensated accumulator.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct ComplexSum {
  KahanSum re, im;
  void add(Complex z) {
    re.add(z.real());
    im.add(z.imag());
  }
  Complex value() const { return {re.value(), im.value()}; }
};

// n^{-s} written so that conj(s) gives exactly conj(n^{-s}).
Complex power_minus_s(double log_n, Complex s) {
  const double mag = std::exp(-s.real() * log_n);
  const double angle = s.imag() * log_n;
  return {mag * std::cos(angle), -mag * std::sin(angle)};
}

struct EmOut {
  Complex value;
  Complex deriv;
  double value_error = 0.0;
  double deriv_error = 0.0;
};

EmOut em_core(Complex s, int terms, int order) {
  const double sigma = s.real();
  const double t_abs = std::abs(s.imag());

  ComplexSum sum, dsum;
  double abs_total = 0.0, dabs_total = 0.0;
  double phase_var = 0.0, dphase_var = 0.0;
  for (int n = 1; n < terms; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const Complex term = power_minus_s(ln, s);
    sum.add(term);
    dsum.add(-ln * term);
    const double mag = std::abs(term);
    abs_total += mag;
    dabs_total += ln * mag;
    // rounding of the phase t*log(n): one ulp of log(n) scaled by t
    const double phase_err = kEps * (t_abs + std::abs(sigma)) * ln * mag;
    phase_var += phase_err * phase_err;
    dphase_var += (ln * phase_err) * (ln * phase_err);
  }

  const double big_n = static_cast<double>(terms);
  const double ln_n = std::log(big_n);
  const Complex n_minus_s = power_minus_s(ln_n, s);
  const Complex sm1 = s - 1.0;

  Complex value = sum.value();
  Complex deriv = dsum.value();
  // N^{1-s}/(s-1) + N^{-s}/2
  const Complex head = n_minus_s * big_n / sm1;
  value += head + 0.5 * n_minus_s;
  deriv += head * (-ln_n - 1.0 / sm1) - 0.5 * ln_n * n_minus_s;
  abs_total += std::abs(head) + 0.5 * std::abs(n_minus_s);

  const auto& coeff = bernoulli_over_factorial();
  Complex poly = s;       // s (s+1) ... (s+2k-2)
  Complex dpoly = 1.0;    // d/ds of poly
  Complex power = n_minus_s / big_n;  // N^{-s-2k+1}
  Complex next_term, next_dterm;
  for (int k = 1; k <= order + 1; ++k) {
    const Complex term = coeff[k - 1] * poly * power;
    const Complex dterm = coeff[k - 1] * (dpoly - ln_n * poly) * power;
    if (k <= order) {
      value += term;
      deriv += dterm;
      abs_total += std::abs(term);
    } else {
      next_term = term;
      next_dterm = dterm;
    }
    const Complex a = s + static_cast<double>(2 * k - 1);
    const Complex b = s + static_cast<double>(2 * k);
    dpoly = dpoly * a * b + poly * (a + b);
    poly *= a * b;
    power /= big_n * big_n;
  }

  // Remainder bound: |first omitted term| * |s + 2M + 1| / (sigma + 2M + 1).
  const double shift = sigma + 2.0 * order + 1.0;
  const double growth = shift > 0.0 ? std::abs(s + (2.0 * order + 1.0)) / shift
                                    : std::numeric_limits<double>::infinity();
  EmOut out;
  out.value = value;
  out.deriv = deriv;
  out.value_error = std::abs(next_term) * growth + 4.0 * kEps * abs_total + 2.0 * std::sqrt(phase_var);
  out.deriv_error = std::abs(next_dterm) * growth * (1.0 + ln_n) +
                    4.0 * kEps * (dabs_total + ln_n * abs_total) + 2.0 * std::sqrt(dphase_var);
  return out;
}

void check_pole(Complex s, const EvalConfig& cfg) {
  if (std::abs(s - 1.0) <= cfg.pole_exclusion_radius) {
    throw Error(ErrorCode::PoleProximity, "|s - 1| <= pole_exclusion_radius");
  }
}

void check_finite(Complex s) {
  if (!is_finite(s)) throw Error(ErrorCode::InvalidConfig, "non-finite argument");
}

std::string fmt_sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

EvalResult check_budget(EvalResult r, const EvalConfig& cfg) {
  const double budget = cfg.budget_for(r.value);
  if (!is_finite(r.value) || !(r.abs_error_estimate <= budget)) {
    throw Error(ErrorCode::AccuracyNotReached,
                "estimate " + fmt_sci(r.abs_error_estimate) + " exceeds " + fmt_sci(budget));
  }
  return r;
}

// Laurent series value and derivative about s = 1.
struct LaurentOut {
  Complex value, deriv;
  double value_error = 0.0, deriv_error = 0.0;
};

LaurentOut laurent_core(Complex s, const StieltjesTable& table, int terms) {
  const Complex d = s - 1.0;
  const double r = std::abs(d);
  Complex value = 1.0 / d;
  Complex deriv = -1.0 / (d * d);
  double abs_total = std::abs(value), dabs_total = std::abs(deriv);
  double table_err = 0.0, dtable_err = 0.0;

  double inv_fact = 1.0;  // 1/n!
  Complex pw = 1.0;       // d^n
  Complex dpw = 0.0;      // n d^{n-1}
  for (int n = 0; n < terms; ++n) {
    const auto& e = table[static_cast<std::size_t>(n)];
    const double c = ((n & 1) ? -1.0 : 1.0) * e.gamma_n * inv_fact;
    value += c * pw;
    deriv += c * dpw;
    abs_total += std::abs(c * pw);
    dabs_total += std::abs(c * dpw);
    table_err += e.abs_error * inv_fact * std::abs(pw);
    dtable_err += e.abs_error * inv_fact * std::abs(dpw);
    dpw = dpw * d + pw;
    pw *= d;
    inv_fact /= static_cast<double>(n + 1);
  }

  // Tail: |gamma_n|/n! <= 4 / (n pi^n) for n >= 1, summed geometrically.
  const int first = std::max(terms, 1);
  const double q = r / kPi;
  double tail = 4.0 / (first * std::pow(kPi, first)) * std::pow(r, first) / (1.0 - q);
  double dtail = tail * (first / std::max(r, 1e-300) + 1.0 / (kPi - r));
  if (static_cast<std::size_t>(terms) < table.size()) {
    const double omitted = std::abs(table[static_cast<std::size_t>(terms)].gamma_n) * inv_fact;
    tail = std::max(tail, omitted * std::pow(r, terms));
    if (terms > 0) dtail = std::max(dtail, omitted * terms * std::pow(r, terms - 1));
  }
  if (terms == 0) {
    // The constant term itself is omitted: |gamma_0| < 0.58.
    tail = std::max(tail, 0.5772156649015329 + 4.0 / kPi * r / (1.0 - q));
  }

  LaurentOut out;
  out.value = value;
  out.deriv = deriv;
  out.value_error = tail + table_err + 4.0 * kEps * abs_total;
  out.deriv_error = dtail + dtable_err + 4.0 * kEps * dabs_total;
  return out;
}

// 2^s pi^(s-1) Gamma(1-s) times e^{-|Im(pi s/2)|}-scaled sin and cos of pi s/2.
struct ChiParts {
  Complex scale;   // exp(s log 2 + (s-1) log pi + log Gamma(1-s) + |Im(pi s /2)|)
  Complex sin_s;   // sin(pi s/2) e^{-|Im(pi s/2)|}
  Complex cos_s;   // cos(pi s/2) e^{-|Im(pi s/2)|}
  double rel_error = 0.0;
};

ChiParts chi_parts(Complex s) {
  const double x = 0.5 * s.real();
  const double a = 0.5 * kPi * std::abs(s.imag());
  const double sign = s.imag() >= 0.0 ? 1.0 : -1.0;
  const double e2 = std::exp(-2.0 * a);
  const double ch = 0.5 * (1.0 + e2);
  const double sh = sign * 0.5 * (1.0 - e2);

  ChiParts p;
  p.sin_s = {sin_pi(x) * ch, cos_pi(x) * sh};
  p.cos_s = {cos_pi(x) * ch, -sin_pi(x) * sh};
  const Complex lg = log_gamma(1.0 - s);
  const Complex log_scale = s * kLog2 + (s - 1.0) * kLogPi + lg + a;
  p.scale = std::exp(log_scale);
  // Phase and magnitude of the exponent carry absolute rounding proportional
  // to their size.
  p.rel_error = 16.0 * kEps * (4.0 + std::abs(lg) + std::abs(s) * 2.0 + a);
  return p;
}

}  // namespace

std::string_view to_string(EvalMethod m) noexcept {
  switch (m) {
    case EvalMethod::EulerMaclaurin: return "EulerMaclaurin";
    case EvalMethod::Laurent: return "Laurent";
    case EvalMethod::Reflection: return "Reflection";
  }
  return "Unknown";
}

void EvalConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
  if (bernoulli_order < 1 || bernoulli_order > kMaxBernoulliOrder) fail("bernoulli_order out of range");
  if (em_terms) {
    if (*em_terms < 1) fail("em_terms must be >= 1");
    if (*em_terms < bernoulli_order) fail("em_terms must be >= bernoulli_order");
  }
  if (laurent_terms < 0) fail("laurent_terms must be >= 0");
  if (!(target_abs_tol > 0.0 && target_abs_tol < 1.0)) fail("target_abs_tol must lie in (0, 1)");
  if (!(pole_exclusion_radius > 0.0)) fail("pole_exclusion_radius must be > 0");
}

int EvalConfig::em_terms_for(Complex s) const {
  if (em_terms) return *em_terms;
  return std::max(20, static_cast<int>(std::ceil(2.0 * std::abs(s.imag()))));
}

// ---------------------------------------------------------------------------
// Stieltjes constants

StieltjesTable::StieltjesTable(std::vector<StieltjesEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].n != static_cast<int>(i)) throw Error(ErrorCode::InvalidConfig, "table indices not contiguous");
    if (!(entries_[i].abs_error > 0.0)) throw Error(ErrorCode::InvalidConfig, "table abs_error must be > 0");
  }
}

namespace {

// x^{-a} * poly(log x), poly in ascending coefficients.
struct LogPowerTerm {
  double a;
  std::vector<double> poly;

  LogPowerTerm derivative() const {
    LogPowerTerm d{a + 1.0, std::vector<double>(poly.size(), 0.0)};
    for (std::size_t i = 0; i < poly.size(); ++i) {
      d.poly[i] += -a * poly[i];
      if (i > 0) d.poly[i - 1] += static_cast<double>(i) * poly[i];
    }
    return d;
  }

  double operator()(double x) const {
    const double l = std::log(x);
    double acc = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) acc = acc * l + poly[i];
    return acc * std::pow(x, -a);
  }
};

// Euler-Maclaurin tail of sum_{k<=x} (log k)^n / k beyond its antiderivative:
// f(x)/2 + f'(x)/12 - f'''(x)/720.
double stieltjes_tail(int n, double x) {
  LogPowerTerm f{1.0, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0)};
  f.poly[static_cast<std::size_t>(n)] = 1.0;
  const LogPowerTerm f1 = f.derivative();
  const LogPowerTerm f3 = f1.derivative().derivative();
  return 0.5 * f(x) + f1(x) / 12.0 - f3(x) / 720.0;
}

struct Checkpoint {
  std::vector<double> corrected;  // per n
  std::vector<double> rounding;   // per n
};

// Tail-corrected partial sums at cutoffs m/4, m/2, m for n = 0..max_n.
// Accumulated in long double: the sum and (log m)^{n+1}/(n+1) cancel to
// many digits once n grows.
std::array<Checkpoint, 3> stieltjes_partials(int max_n, std::int64_t m) {
  using LD = long double;
  const std::size_t count = static_cast<std::size_t>(max_n) + 1;
  const std::array<std::int64_t, 3> cut = {m / 4, m / 2, m};
  std::vector<LD> sums(count, 0.0L), comp(count, 0.0L);
  std::array<Checkpoint, 3> out;
  std::size_t next = 0;
  const LD ld_eps = std::numeric_limits<LD>::epsilon();
  for (std::int64_t k = 1; k <= m && next < 3; ++k) {
    const LD l = std::log(static_cast<LD>(k));
    LD p = 1.0L / static_cast<LD>(k);
    for (std::size_t n = 0; n < count; ++n) {
      const LD y = p - comp[n];
      const LD t = sums[n] + y;
      comp[n] = (t - sums[n]) - y;
      sums[n] = t;
      p *= l;
    }
    while (next < 3 && k == cut[next]) {
      const double x = static_cast<double>(k);
      const LD lx = std::log(static_cast<LD>(k));
      Checkpoint cp;
      cp.corrected.resize(count);
      cp.rounding.resize(count);
      for (std::size_t n = 0; n < count; ++n) {
        const LD anti = std::pow(lx, static_cast<LD>(n + 1)) / static_cast<LD>(n + 1);
        const LD diff = sums[n] - anti;
        cp.corrected[n] = static_cast<double>(diff) - stieltjes_tail(static_cast<int>(n), x);
        cp.rounding[n] = static_cast<double>(ld_eps * (static_cast<LD>(n) + 4.0L) * (std::abs(sums[n]) + anti)) +
                         kEps * std::abs(cp.corrected[n]);
      }
      out[next++] = std::move(cp);
    }
  }
  return out;
}

StieltjesValue extrapolate(const std::array<Checkpoint, 3>& cp, std::size_t n) {
  // Residual of the corrected sums decays like x^{-6}: Richardson with 2^6.
  const double c4 = cp[0].corrected[n], c2 = cp[1].corrected[n], c1 = cp[2].corrected[n];
  const double r1 = c1 + (c1 - c2) / 63.0;
  const double r2 = c2 + (c2 - c4) / 63.0;
  const double floor = cp[2].rounding[n] + cp[1].rounding[n];
  const double gap_fine = std::abs(c1 - c2);
  const double gap_coarse = std::abs(c2 - c4);
  if (gap_fine > gap_coarse && gap_fine > 16.0 * floor) {
    throw Error(ErrorCode::NonConvergent, "Stieltjes extrapolants diverge for n = " + std::to_string(n));
  }
  StieltjesValue v;
  v.gamma_n = r1;
  v.abs_error = std::abs(r1 - r2) + floor;
  return v;
}

}  // namespace

StieltjesValue eval_stieltjes(int n, std::int64_t m) {
  if (n < 0) throw Error(ErrorCode::InvalidConfig, "n must be >= 0");
  if (m < 10) throw Error(ErrorCode::InvalidConfig, "m must be >= 10");
  const auto cp = stieltjes_partials(n, m);
  return extrapolate(cp, static_cast<std::size_t>(n));
}

StieltjesTable build_stieltjes_table(int max_n, std::int64_t m) {
  if (max_n < 0) throw Error(ErrorCode::InvalidConfig, "max_n must be >= 0");
  if (m < 10) throw Error(ErrorCode::InvalidConfig, "m must be >= 10");
  const auto cp = stieltjes_partials(max_n, m);
  std::vector<StieltjesEntry> entries;
  for (int n = 0; n <= max_n; ++n) {
    const auto v = extrapolate(cp, static_cast<std::size_t>(n));
    entries.push_back({n, v.gamma_n, v.abs_error});
  }
  return StieltjesTable(std::move(entries));
}

const StieltjesTable& default_stieltjes_table() {
  static const StieltjesTable table = build_stieltjes_table(24, 100000);
  return table;
}

// ---------------------------------------------------------------------------
// Evaluators

EvalResult eval_zeta_laurent(Complex s, const StieltjesTable& table, int laurent_terms) {
  check_finite(s);
  if (s == Complex(1.0, 0.0)) throw Error(ErrorCode::AtPole, "s = 1");
  if (laurent_terms < 0 || static_cast<std::size_t>(laurent_terms) > table.size()) {
    throw Error(ErrorCode::InsufficientTable, "laurent_terms exceeds table length");
  }
  if (!(std::abs(s - 1.0) < 1.0)) throw Error(ErrorCode::DomainWarning, "|s - 1| >= 1");
  const auto out = laurent_core(s, table, laurent_terms);
  return {out.value, out.value_error, EvalMethod::Laurent};
}

EvalResult eval_zeta_em(Complex s, const EvalConfig& cfg) {
  cfg.validate();
  check_finite(s);
  check_pole(s, cfg);
  const auto out = em_core(s, cfg.em_terms_for(s), cfg.bernoulli_order);
  return check_budget({out.value, out.value_error, EvalMethod::EulerMaclaurin}, cfg);
}

ZetaPair eval_zeta_em_pair(Complex s, const EvalConfig& cfg) {
  check_finite(s);
  check_pole(s, cfg);
  const auto out = em_core(s, cfg.em_terms_for(s), cfg.bernoulli_order);
  return {out.value, out.deriv, out.value_error, out.deriv_error};
}

namespace {

bool near_integer_at_least_two(Complex s, long& k) {
  k = std::lround(s.real());
  return k >= 2 && std::abs(s - static_cast<double>(k)) < 1e-9;
}

ZetaPair reflection_pair(Complex s, const EvalConfig& cfg, bool want_deriv) {
  const Complex u = 1.0 - s;
  ChiParts chi;
  try {
    chi = chi_parts(s);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::AtPole) throw Error(ErrorCode::ReflectionSingular, "Gamma(1-s) at a pole");
    throw;
  }
  const Complex chi_v = chi.scale * chi.sin_s;
  const auto inner = em_core(u, cfg.em_terms_for(u), cfg.bernoulli_order);
  ZetaPair p;
  p.value = chi_v * inner.value;
  p.value_error = std::abs(chi_v) * inner.value_error + chi.rel_error * std::abs(p.value);
  if (want_deriv) {
    const Complex psi = digamma(u);
    const Complex chi_d =
        chi.scale * ((kLog2 + kLogPi) * chi.sin_s + 0.5 * kPi * chi.cos_s - chi.sin_s * psi);
    p.deriv = chi_d * inner.value - chi_v * inner.deriv;
    p.deriv_error = std::abs(chi_d) * inner.value_error + std::abs(chi_v) * inner.deriv_error +
                    chi.rel_error * (std::abs(chi_d * inner.value) + std::abs(chi_v * inner.deriv));
  }
  return p;
}

enum class Region { Laurent, Reflection, EulerMaclaurin };

Region region_of(Complex s) {
  if (std::abs(s - 1.0) < 0.5) return Region::Laurent;
  if (s.real() < -0.5) return Region::Reflection;
  return Region::EulerMaclaurin;
}

}  // namespace

EvalResult eval_zeta(Complex s, const EvalConfig& cfg) {
  cfg.validate();
  check_finite(s);
  check_pole(s, cfg);
  switch (region_of(s)) {
    case Region::Laurent:
      return check_budget(eval_zeta_laurent(s, default_stieltjes_table(), cfg.laurent_terms), cfg);
    case Region::Reflection: {
      const auto p = reflection_pair(s, cfg, false);
      return check_budget({p.value, p.value_error, EvalMethod::Reflection}, cfg);
    }
    case Region::EulerMaclaurin: break;
  }
  const auto out = em_core(s, cfg.em_terms_for(s), cfg.bernoulli_order);
  return check_budget({out.value, out.value_error, EvalMethod::EulerMaclaurin}, cfg);
}

ZetaPair eval_zeta_pair(Complex s, const EvalConfig& cfg) {
  check_finite(s);
  check_pole(s, cfg);
  switch (region_of(s)) {
    case Region::Laurent: {
      const auto& table = default_stieltjes_table();
      const int terms = std::min<int>(cfg.laurent_terms, static_cast<int>(table.size()));
      const auto out = laurent_core(s, table, terms);
      return {out.value, out.deriv, out.value_error, out.deriv_error};
    }
    case Region::Reflection: return reflection_pair(s, cfg, true);
    case Region::EulerMaclaurin: break;
  }
  const auto out = em_core(s, cfg.em_terms_for(s), cfg.bernoulli_order);
  return {out.value, out.deriv, out.value_error, out.deriv_error};
}

EvalResult eval_zeta_prime(Complex s, const EvalConfig& cfg) {
  cfg.validate();
  const auto p = eval_zeta_pair(s, cfg);
  EvalMethod method = EvalMethod::EulerMaclaurin;
  switch (region_of(s)) {
    case Region::Laurent: method = EvalMethod::Laurent; break;
    case Region::Reflection: method = EvalMethod::Reflection; break;
    case Region::EulerMaclaurin: break;
  }
  return check_budget({p.deriv, p.deriv_error, method}, cfg);
}

EvalResult eval_gamma(Complex s) {
  check_finite(s);
  const Complex v = gamma(s);
  const double rel = 16.0 * kEps * (8.0 + std::abs(std::log(std::abs(v))) + std::abs(s));
  return {v, rel * std::abs(v), EvalMethod::EulerMaclaurin};
}

EvalResult reflection_rhs(Complex s, const EvalConfig& cfg) {
  cfg.validate();
  check_finite(s);
  check_pole(s, cfg);
  const Complex u = 1.0 - s;
  check_pole(u, cfg);
  long k = 0;
  if (near_integer_at_least_two(s, k)) {
    if (!cfg.reflection_limit_mode) {
      throw Error(ErrorCode::ReflectionSingular, "s = " + std::to_string(k) + " (0 * inf in Gamma(1-s) sin(pi s/2))");
    }
    // sin(pi s/2) Gamma(1-s) = pi / (2 cos(pi s/2) Gamma(s)).
    const Complex two_pi_s = std::exp(s * (kLog2 + kLogPi));
    const Complex gs = gamma(s);
    // 1 - s is a negative integer; eval_zeta_pair reaches it by reflection.
    const auto inner = eval_zeta_pair(u, cfg);
    Complex value;
    double err;
    if (k % 2 == 0) {
      const Complex factor = two_pi_s / (2.0 * cos_pi(0.5 * s) * gs);
      value = factor * inner.value;
      err = std::abs(factor) * inner.value_error;
    } else {
      // cos(pi s/2) and zeta(1-s) vanish together; take the ratio of derivatives.
      const Complex factor = two_pi_s / (kPi * gs * sin_pi(0.5 * s));
      value = factor * inner.deriv;
      err = std::abs(factor) * inner.deriv_error;
    }
    err += 64.0 * kEps * std::abs(value) * (1.0 + std::abs(s));
    return {value, err, EvalMethod::Reflection};
  }
  const auto p = reflection_pair(s, cfg, false);
  return {p.value, p.value_error, EvalMethod::Reflection};
}

}  // namespace zatlas
