#pragma once

#include <complex>

#include "zatlas/pipeline.hpp"

namespace fixture {

/// Default scan box [-1, 10] x [0.1, 60], computed once per test binary.
inline const zatlas::ScanResult& scan60() {
  static const zatlas::ScanResult scan = zatlas::run_scan(zatlas::RunConfig{});
  return scan;
}

inline const zatlas::TraceConfig& trace60() {
  static const zatlas::TraceConfig cfg = [] {
    zatlas::RunConfig rc;
    zatlas::TraceConfig tc = rc.trace;
    tc.domain_box = rc.region.box();
    return tc;
  }();
  return cfg;
}

/// Newton projection onto Im zeta = 0 along the gradient of Im zeta.
template <class Eval>
std::complex<double> project_real_level(std::complex<double> p, Eval&& eval) {
  for (int i = 0; i < 30; ++i) {
    const auto [z, dz] = eval(p);
    const std::complex<double> g(dz.imag(), dz.real());
    const double step = z.imag() / std::norm(g);
    p -= step * g;
    if (std::abs(step) * std::abs(g) < 1e-15) break;
  }
  return p;
}

}  // namespace fixture
