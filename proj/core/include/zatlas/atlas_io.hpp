#pragma once

// Text serialization of atlas records. Every double is written with 17
// significant digits so that a write/read cycle is exact.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zatlas/curve_atlas.hpp"
#include "zatlas/strip_topology.hpp"
#include "zatlas/zero_lab.hpp"

namespace zatlas {

/// "%.17g", with "-0.0" for negative zero. Throws Error{InvalidConfig} on
/// non-finite input.
std::string format_double(double x);

/// Header `t,sigma,residual,local_order,curve_id`; curve_id is empty when unowned.
std::string zeros_to_csv(std::span<const ZeroRecord> zeros);
/// Throws Error{ParseError}.
std::vector<ZeroRecord> zeros_from_csv(std::string_view text);

std::string curves_to_json(std::span<const TracedCurve> curves);
std::vector<TracedCurve> curves_from_json(std::string_view text);

std::string strips_to_json(std::span<const StripRecord> strips, const Census& census);
std::vector<StripRecord> strips_from_json(std::string_view text);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// One `PASS name: detail` / `FAIL name: detail` line per check.
std::string checks_to_text(std::span<const CheckResult> checks);
std::string checks_to_json(std::span<const CheckResult> checks);

/// Parses "a+bi", "a-bi", "a", "bi" (spaces ignored). Throws Error{ParseError}.
Complex parse_complex(std::string_view text);

}  // namespace zatlas
