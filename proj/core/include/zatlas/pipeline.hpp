#pragma once

// Scan orchestration shared by the command-line tool and the tests.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zatlas/atlas_io.hpp"
#include "zatlas/curve_atlas.hpp"
#include "zatlas/strip_topology.hpp"
#include "zatlas/zero_lab.hpp"

namespace zatlas {

inline constexpr const char* kVersion = "0.3.0";

/// Scanned part of the upper half-plane; the conjugate half is produced by
/// reflection when `mirror` is set.
struct ScanRegion {
  double sigma_lo = -1.0;
  double sigma_hi = 10.0;
  double t_lo = 0.1;
  double t_hi = 60.0;
  bool mirror = false;

  /// Throws Error{InvalidConfig}.
  void validate() const;
  Rect box() const noexcept { return {sigma_lo, sigma_hi, t_lo, t_hi}; }
};

struct RunConfig {
  ScanRegion region;
  TraceConfig trace;
  ZeroSearchConfig zeros;
  std::vector<double> lemma2_probes{5.0, 10.0, 15.0};
  /// Complete strips, counted from the bottom, that get the Lemma 2 check.
  int lemma2_strips = 5;
  double line_tol = 1e-8;
  /// Unset: default_gap_tol(t_hi).
  std::optional<double> gap_tol;

  void validate() const;
};

/// Applies `key = value` lines; `#` starts a comment. Throws Error{ParseError}
/// for unknown keys or malformed values.
void apply_config_text(RunConfig& cfg, std::string_view text);
void apply_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

/// Effective configuration as sorted key/value pairs (the keys accepted above).
std::vector<std::pair<std::string, std::string>> config_snapshot(const RunConfig& cfg);

struct ScanResult {
  Atlas atlas;
  std::vector<ZeroRecord> zeros;
  std::vector<StripRecord> strips;
  Census census;
};

Atlas run_trace(const RunConfig& cfg);
std::vector<ZeroRecord> run_zeros(const RunConfig& cfg, const Atlas& atlas);
/// Atlas, zeros and strips; writes strip/component indices back onto the curves.
ScanResult run_scan(const RunConfig& cfg);

/// Curves whose closures meet at a common point where zeta = 1.
bool share_one_point(const TracedCurve& a, const TracedCurve& b);

/// Gamma curves on or above the Gamma curve through the lowest zero.
std::vector<int> gamma_curves_above_first_zero(const ScanResult& scan);

/// Invariant and lemma checks over a finished scan.
std::vector<CheckResult> verify_suite(const ScanResult& scan, const RunConfig& cfg);

std::vector<ZeroRecord> mirror_zeros(std::span<const ZeroRecord> zeros);
std::vector<TracedCurve> mirror_curves(std::span<const TracedCurve> curves);

}  // namespace zatlas
