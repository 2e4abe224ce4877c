#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "zatlas/error.hpp"
#include "zatlas/pipeline.hpp"

namespace zatlas::cli {
namespace {

struct Flags {
  double t_min = 0.0, t_max = 0.0, sigma_min = 0.0, sigma_max = 0.0, step = 0.0, tol = 0.0;
  std::string out = "zatlas_out";
  std::string config;
  bool mirror = false;
  std::string s;
};

struct Options {
  CLI::Option* t_min = nullptr;
  CLI::Option* t_max = nullptr;
  CLI::Option* sigma_min = nullptr;
  CLI::Option* sigma_max = nullptr;
  CLI::Option* step = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* mirror = nullptr;
};

Options add_scan_flags(CLI::App* sub, Flags& f) {
  Options o;
  o.t_min = sub->add_option("--t-min", f.t_min, "Lower ordinate of the scan box (> 0)");
  o.t_max = sub->add_option("--t-max", f.t_max, "Upper ordinate of the scan box (<= 400)");
  o.sigma_min = sub->add_option("--sigma-min", f.sigma_min, "Left edge of the scan box");
  o.sigma_max = sub->add_option("--sigma-max", f.sigma_max, "Right edge of the scan box");
  o.step = sub->add_option("--step", f.step, "Maximum tracer step");
  o.tol = sub->add_option("--tol", f.tol, "Corrector tolerance");
  o.mirror = sub->add_flag("--mirror", f.mirror, "Also emit the conjugate (t < 0) data");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--config", f.config, "key = value configuration file");
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig build_config(const Flags& f, const Options& o) {
  RunConfig cfg;
  if (!f.config.empty()) apply_config_text(cfg, read_file(f.config));
  auto set = [&](CLI::Option* opt, const char* key, double v) {
    if (opt && opt->count() > 0) apply_config_value(cfg, key, format_double(v));
  };
  set(o.t_min, "t_min", f.t_min);
  set(o.t_max, "t_max", f.t_max);
  set(o.sigma_min, "sigma_min", f.sigma_min);
  set(o.sigma_max, "sigma_max", f.sigma_max);
  set(o.step, "step", f.step);
  set(o.tol, "tol", f.tol);
  if (o.mirror && o.mirror->count() > 0) cfg.region.mirror = true;
  cfg.validate();
  return cfg;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_eval(const Flags& f, std::ostream& out) {
  RunConfig cfg;
  if (!f.config.empty()) apply_config_text(cfg, read_file(f.config));
  cfg.trace.eval.validate();
  if (f.s.empty()) throw Error(ErrorCode::InvalidConfig, "eval needs --s");
  const Complex s = parse_complex(f.s);
  const EvalResult v = eval_zeta(s, cfg.trace.eval);
  const EvalResult d = eval_zeta_prime(s, cfg.trace.eval);
  out << "s = " << fmt(s.real()) << (s.imag() < 0 ? " - " : " + ") << fmt(std::abs(s.imag())) << "i\n";
  out << "zeta(s) = " << fmt(v.value.real()) << (v.value.imag() < 0 ? " - " : " + ") << fmt(std::abs(v.value.imag()))
      << "i\n";
  out << "abs_error_estimate = " << fmt(v.abs_error_estimate) << "\n";
  out << "method = " << to_string(v.method) << "\n";
  out << "zeta'(s) = " << fmt(d.value.real()) << (d.value.imag() < 0 ? " - " : " + ") << fmt(std::abs(d.value.imag()))
      << "i\n";
  out << "zeta'_abs_error_estimate = " << fmt(d.abs_error_estimate) << "\n";
  return kOk;
}

int cmd_scan(const std::string& command, const Flags& f, const Options& o, std::ostream& out) {
  const RunConfig cfg = build_config(f, o);
  Manifest m;
  m.command = command;
  m.config = config_snapshot(cfg);
  m.started_utc = utc_now();
  const std::filesystem::path dir(f.out);
  std::filesystem::create_directories(dir);
  int status = kOk;

  if (command == "trace") {
    const Atlas atlas = run_trace(cfg);
    write_output(dir, "curves.json", curves_to_json(atlas.curves), m);
    if (cfg.region.mirror) write_output(dir, "curves_mirror.json", curves_to_json(mirror_curves(atlas.curves)), m);
    out << atlas.curves.size() << " curves traced";
    if (!atlas.events.empty()) out << ", " << atlas.events.size() << " seeds rejected";
    out << "\n";
  } else if (command == "zeros") {
    const Atlas atlas = run_trace(cfg);
    const auto zeros = run_zeros(cfg, atlas);
    write_output(dir, "zeros.csv", zeros_to_csv(zeros), m);
    if (cfg.region.mirror) write_output(dir, "zeros_mirror.csv", zeros_to_csv(mirror_zeros(zeros)), m);
    out << zeros.size() << " zeros\n";
  } else {
    const ScanResult scan = run_scan(cfg);
    if (command == "strips" || command == "report") {
      write_output(dir, "strips.json", strips_to_json(scan.strips, scan.census), m);
    }
    if (command == "report") {
      write_output(dir, "curves.json", curves_to_json(scan.atlas.curves), m);
      write_output(dir, "zeros.csv", zeros_to_csv(scan.zeros), m);
      if (cfg.region.mirror) {
        write_output(dir, "curves_mirror.json", curves_to_json(mirror_curves(scan.atlas.curves)), m);
        write_output(dir, "zeros_mirror.csv", zeros_to_csv(mirror_zeros(scan.zeros)), m);
      }
    }
    if (command == "verify" || command == "report") {
      m.verdicts = verify_suite(scan, cfg);
      const std::string text = checks_to_text(m.verdicts);
      write_output(dir, "report.txt", text, m);
      write_output(dir, "report.json", checks_to_json(m.verdicts), m);
      out << text;
      for (const auto& c : m.verdicts) {
        if (!c.pass && command == "verify") status = kVerificationFailure;
      }
    }
    if (command == "strips") {
      out << scan.strips.size() << " strips, census";
      for (const auto& [mt, n] : scan.census.histogram) out << " m" << mt << "=" << n;
      out << "\n";
    }
  }
  m.finished_utc = utc_now();
  std::ofstream(dir / "manifest.json", std::ios::binary) << manifest_to_json(m);
  return status;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level-curve atlas of the Riemann zeta function", "zatlas"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Flags f;
  auto* eval = app.add_subcommand("eval", "Evaluate zeta and zeta' at one point");
  eval->add_option("--s", f.s, "Point, e.g. 2+0i or 0.5+14.1347i")->required();
  eval->add_option("--config", f.config, "key = value configuration file");

  struct Sub {
    const char* name;
    const char* help;
    CLI::App* app = nullptr;
    Options opts;
  };
  Sub subs[] = {{"trace", "Trace real-axis pre-images and write curves.json", nullptr, {}},
                {"zeros", "Locate zeros and write zeros.csv", nullptr, {}},
                {"strips", "Assemble strips and write strips.json", nullptr, {}},
                {"verify", "Run the verification suite; status 1 on any failure", nullptr, {}},
                {"report", "Write every output file plus the verification report", nullptr, {}}};
  for (auto& s : subs) {
    s.app = app.add_subcommand(s.name, s.help);
    s.opts = add_scan_flags(s.app, f);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (eval->parsed()) return cmd_eval(f, out);
    for (auto& s : subs) {
      if (s.app->parsed()) return cmd_scan(s.name, f, s.opts, out);
    }
  } catch (const Error& e) {
    err << "zatlas: " << e.what() << "\n";
    const bool config = e.code() == ErrorCode::InvalidConfig || e.code() == ErrorCode::ParseError;
    return config ? kConfigError : kComputeError;
  } catch (const std::exception& e) {
    err << "zatlas: " << e.what() << "\n";
    return kComputeError;
  }
  return kConfigError;
}

}  // namespace zatlas::cli
