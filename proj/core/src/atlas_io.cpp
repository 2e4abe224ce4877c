#include "zatlas/atlas_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "zatlas/error.hpp"

namespace zatlas {
namespace {

using nlohmann::json;

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : "null"; }

std::string opt_double(const std::optional<double>& v) { return v ? format_double(*v) : "null"; }

std::string point(Complex s) { return "[" + format_double(s.real()) + "," + format_double(s.imag()) + "]"; }

template <class T, class F>
std::string list(const std::vector<T>& xs, F f) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += f(xs[i]);
  }
  return out + "]";
}

double num(const json& j) {
  if (!j.is_number()) throw Error(ErrorCode::ParseError, "expected a number");
  return j.get<double>();
}

std::optional<int> opt_int_of(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<int>();
}

Complex point_of(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::ParseError, "expected [sigma, t]");
  return {num(j[0]), num(j[1])};
}

EndKind end_of(const std::string& s) {
  for (const EndKind e : {EndKind::EscapesRight, EndKind::EscapesDomain, EndKind::ClosedLoop, EndKind::OnePoint,
                          EndKind::SampleLimit}) {
    if (to_string(e) == s) return e;
  }
  throw Error(ErrorCode::ParseError, "unknown end kind " + s);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw Error(ErrorCode::ParseError, "bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidConfig, "non-finite value in export");
  if (x == 0.0) return std::signbit(x) ? "-0.0" : "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string zeros_to_csv(std::span<const ZeroRecord> zeros) {
  std::string out = "t,sigma,residual,local_order,curve_id\n";
  for (const auto& z : zeros) {
    out += format_double(z.t) + "," + format_double(z.sigma) + "," + format_double(z.residual) + "," +
           std::to_string(z.local_order) + "," + (z.owning_curve ? std::to_string(*z.owning_curve) : "") + "\n";
  }
  return out;
}

std::vector<ZeroRecord> zeros_from_csv(std::string_view text) {
  std::vector<ZeroRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != std::vector<std::string>{"t", "sigma", "residual", "local_order", "curve_id"}) {
    throw Error(ErrorCode::ParseError, "missing zeros header");
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw Error(ErrorCode::ParseError, "expected 5 fields: " + line);
    ZeroRecord z;
    z.t = parse_double(f[0]);
    z.sigma = parse_double(f[1]);
    z.residual = parse_double(f[2]);
    z.local_order = static_cast<int>(parse_double(f[3]));
    if (!f[4].empty()) z.owning_curve = static_cast<int>(parse_double(f[4]));
    z.anomalous = z.local_order != 1;
    out.push_back(z);
  }
  return out;
}

std::string curves_to_json(std::span<const TracedCurve> curves) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const TracedCurve& c = curves[i];
    out += "{\"id\":" + std::to_string(c.id) + ",\"kind\":" + quote(to_string(c.kind.tag()));
    out += ",\"radius\":" + opt_double(c.kind.radius());
    out += ",\"strip\":" + opt_int(c.strip_index) + ",\"component\":" + opt_int(c.component_index);
    out += ",\"ends\":[" + quote(to_string(c.ends[0])) + "," + quote(to_string(c.ends[1])) + "]";
    out += ",\"terminals\":[";
    for (int k = 0; k < 2; ++k) {
      if (k) out += ",";
      out += c.terminals[k] ? point(*c.terminals[k]) : "null";
    }
    out += "],\"samples\":[";
    for (std::size_t n = 0; n < c.samples.size(); ++n) {
      const auto& s = c.samples[n];
      if (n) out += ",";
      out += "[" + format_double(s.s.real()) + "," + format_double(s.s.imag()) + "," + format_double(s.z.real()) + "," +
             format_double(s.z.imag()) + "]";
    }
    out += "]}";
    out += i + 1 < curves.size() ? ",\n" : "\n";
  }
  return out + "]\n";
}

std::vector<TracedCurve> curves_from_json(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_array()) throw Error(ErrorCode::ParseError, "curves document must be an array");
  std::vector<TracedCurve> out;
  try {
    for (const auto& o : doc) {
      TracedCurve c;
      c.id = o.at("id").get<int>();
      const std::string kind = o.at("kind").get<std::string>();
      if (kind == "PreimageBelowOne") {
        c.kind = CurveKind::below_one();
      } else if (kind == "PreimageAboveOne") {
        c.kind = CurveKind::above_one();
      } else if (kind == "CirclePreimage") {
        c.kind = CurveKind::circle(num(o.at("radius")));
      } else {
        throw Error(ErrorCode::ParseError, "unknown curve kind " + kind);
      }
      c.strip_index = opt_int_of(o.at("strip"));
      c.component_index = opt_int_of(o.at("component"));
      for (int k = 0; k < 2; ++k) {
        c.ends[k] = end_of(o.at("ends").at(k).get<std::string>());
        const json& t = o.at("terminals").at(k);
        if (!t.is_null()) c.terminals[k] = point_of(t);
      }
      for (const auto& s : o.at("samples")) {
        if (!s.is_array() || s.size() != 4) throw Error(ErrorCode::ParseError, "sample must have 4 numbers");
        c.samples.push_back({{num(s[0]), num(s[1])}, {num(s[2]), num(s[3])}});
      }
      out.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return out;
}

std::string strips_to_json(std::span<const StripRecord> strips, const Census& census) {
  std::string out = "{\n\"summary\":{\"histogram\":{";
  bool first = true;
  for (const auto& [m, n] : census.histogram) {
    if (!first) out += ",";
    first = false;
    out += quote(std::to_string(m)) + ":" + std::to_string(n);
  }
  out += "},\"sum_m_type\":" + std::to_string(census.sum_m_type);
  out += ",\"zeros_in_complete\":" + std::to_string(census.zeros_in_complete);
  out += ",\"zeros_in_partial\":" + std::to_string(census.zeros_in_partial);
  out += ",\"zeros_total\":" + std::to_string(census.zeros_total);
  out += ",\"consistent\":" + std::string(census.consistent() ? "true" : "false");
  out += ",\"first_multi\":";
  if (census.first_multi_j) {
    out += "{\"j\":" + std::to_string(*census.first_multi_j) + ",\"t_range\":";
    out += census.first_multi_t_range ? "[" + format_double(census.first_multi_t_range->first) + "," +
                                            format_double(census.first_multi_t_range->second) + "]"
                                      : "null";
    out += "}";
  } else {
    out += "null";
  }
  out += "},\n\"strips\":[\n";
  auto ints = [](const std::vector<int>& v) { return list(v, [](int x) { return std::to_string(x); }); };
  for (std::size_t i = 0; i < strips.size(); ++i) {
    const StripRecord& s = strips[i];
    out += "{\"j\":" + std::to_string(s.j) + ",\"lower\":" + opt_int(s.lower_gamma_prime) +
           ",\"upper\":" + opt_int(s.upper_gamma_prime) + ",\"partial\":" + (s.partial ? "true" : "false") +
           ",\"m_type\":" + std::to_string(s.m_type) + ",\"principal\":" + opt_int(s.principal) +
           ",\"gamma_components\":" + ints(s.gamma_components) + ",\"gamma_prime_pieces\":" + ints(s.gamma_prime_pieces) +
           ",\"zeros\":" + list(s.zeros, [](std::size_t x) { return std::to_string(x); }) +
           ",\"one_points\":" + list(s.one_points, point) + ",\"minus_one_points\":" + list(s.minus_one_points, point) +
           ",\"inconsistent\":" + (s.inconsistent ? "true" : "false") +
           ",\"one_points_missing\":" + (s.one_points_missing ? "true" : "false") + ",\"t_lower\":" + opt_double(s.t_lower) +
           ",\"t_upper\":" + opt_double(s.t_upper) + "}";
    out += i + 1 < strips.size() ? ",\n" : "\n";
  }
  return out + "]\n}\n";
}

std::vector<StripRecord> strips_from_json(std::string_view text) {
  const json doc = parse_json(text);
  std::vector<StripRecord> out;
  try {
    for (const auto& o : doc.at("strips")) {
      StripRecord s;
      s.j = o.at("j").get<int>();
      s.lower_gamma_prime = opt_int_of(o.at("lower"));
      s.upper_gamma_prime = opt_int_of(o.at("upper"));
      s.partial = o.at("partial").get<bool>();
      s.m_type = o.at("m_type").get<int>();
      s.principal = opt_int_of(o.at("principal"));
      s.gamma_components = o.at("gamma_components").get<std::vector<int>>();
      s.gamma_prime_pieces = o.at("gamma_prime_pieces").get<std::vector<int>>();
      s.zeros = o.at("zeros").get<std::vector<std::size_t>>();
      for (const auto& p : o.at("one_points")) s.one_points.push_back(point_of(p));
      for (const auto& p : o.at("minus_one_points")) s.minus_one_points.push_back(point_of(p));
      s.inconsistent = o.at("inconsistent").get<bool>();
      s.one_points_missing = o.at("one_points_missing").get<bool>();
      if (!o.at("t_lower").is_null()) s.t_lower = num(o.at("t_lower"));
      if (!o.at("t_upper").is_null()) s.t_upper = num(o.at("t_upper"));
      out.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return out;
}

std::string checks_to_text(std::span<const CheckResult> checks) {
  std::string out;
  for (const auto& c : checks) out += std::string(c.pass ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
  return out;
}

std::string checks_to_json(std::span<const CheckResult> checks) {
  std::string out = "{\"checks\":[\n";
  bool all = true;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto& c = checks[i];
    all = all && c.pass;
    out += "{\"name\":" + quote(c.name) + ",\"pass\":" + (c.pass ? "true" : "false") + ",\"detail\":" + quote(c.detail) + "}";
    out += i + 1 < checks.size() ? ",\n" : "\n";
  }
  out += "],\"all_pass\":" + std::string(all ? "true" : "false") + "}\n";
  return out;
}

Complex parse_complex(std::string_view text) {
  std::string s;
  for (const char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty complex literal");
  auto bad = [&]() { return Error(ErrorCode::ParseError, "cannot parse complex '" + std::string(text) + "'"); };
  const bool imaginary = s.back() == 'i' || s.back() == 'j';
  if (!imaginary) return {parse_double(s), 0.0};
  s.pop_back();
  // Split at the last sign that is not part of an exponent.
  std::size_t cut = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  auto imag_part = [&](std::string p) {
    if (p.empty() || p == "+") return 1.0;
    if (p == "-") return -1.0;
    return parse_double(p);
  };
  try {
    if (cut == std::string::npos) return {0.0, imag_part(s)};
    return {parse_double(s.substr(0, cut)), imag_part(s.substr(cut))};
  } catch (const Error&) {
    throw bad();
  }
}

}  // namespace zatlas
