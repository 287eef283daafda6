// radbif: command-line front end for the radial bifurcation library.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "radbif/radbif.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace radbif;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

struct Overrides {
  std::optional<double> p, tol, gamma_min, gamma_max;
  std::optional<int> N, n;
  std::optional<std::string> out, config;
};

io::RunConfig resolve(const Overrides& o) {
  io::RunConfig cfg;
  if (o.config) io::parse_config(io::read_file(*o.config), cfg);
  if (o.p) cfg.p = *o.p;
  if (o.N) cfg.N = *o.N;
  if (o.tol) cfg.tol = *o.tol;
  if (o.gamma_min) cfg.gamma_min = *o.gamma_min;
  if (o.gamma_max) cfg.gamma_max = *o.gamma_max;
  if (o.n) cfg.n = *o.n;
  if (o.out) cfg.out = *o.out;
  if (!(cfg.tol >= 1e-13 && cfg.tol <= 1e-6)) fail(ErrorKind::ParameterDomain, "tol must lie in [1e-13, 1e-6]");
  if (cfg.n < 1) fail(ErrorKind::ParameterDomain, "n must be >= 1");
  if (!(cfg.gamma_min > 0.0 && cfg.gamma_max > cfg.gamma_min))
    fail(ErrorKind::ParameterDomain, "need 0 < gamma-min < gamma-max");
  return cfg;
}

void add_common(CLI::App* sub, Overrides& o, bool with_range, bool with_n) {
  sub->add_option("--p", o.p, "exponent p > 1 (default 6)");
  sub->add_option("--N", o.N, "dimension N >= 3 (default 3)");
  sub->add_option("--tol", o.tol, "integrator tolerance (default 1e-10)");
  sub->add_option("--out", o.out, "output directory (default .)");
  sub->add_option("--config", o.config, "key = value configuration file; flags override it");
  if (with_range) {
    sub->add_option("--gamma-min", o.gamma_min, "smallest initial height (default 1e-4)");
    sub->add_option("--gamma-max", o.gamma_max, "largest initial height (default 1e6)");
  }
  if (with_n) sub->add_option("--n", o.n, "branch index / number of critical points (default 1)");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) { return io::format_shortest(v); }

int cmd_constants(const io::RunConfig& cfg) {
  const DerivedConstants c = derive(cfg.p, cfg.N);
  auto row = [](const char* k, const std::string& v) { std::printf("%-10s %s\n", k, v.c_str()); };
  row("p", fmt(c.p()));
  row("N", std::to_string(c.N()));
  row("theta", fmt(c.theta));
  row("p_S", fmt(c.p_S));
  row("p_JL", c.p_JL.is_infinite() ? "inf" : fmt(c.p_JL.value()));
  if (c.emden) {
    row("A", fmt(c.emden->A));
    row("m", fmt(c.emden->m));
    row("alpha", fmt(c.emden->alpha));
  } else {
    row("A", "undefined");
    row("m", "undefined");
    row("alpha", "undefined");
  }
  row("regime", std::string(to_string(c.regime)));
  if (is_supercritical(c.regime)) {
    const EquilibriumReport e = classify_equilibrium(c);
    row("focus", std::string(to_string(e.focus)));
    row("disc", fmt(e.focus_discriminant));
  }
  return kOk;
}

int cmd_singular(const io::RunConfig& cfg) {
  const DerivedConstants c = derive(cfg.p, cfg.N);
  const SingularProfile prof = compute_singular(c, cfg.n, cfg.tol);

  io::CsvTable t{{"s", "u_star", "du_star"}, {}};
  for (double s : prof.u_star.breakpoints()) {
    const Sample v = prof.u_star.eval(s);
    t.rows.push_back({s, v.u, v.du});
  }
  json stars = json::array();
  for (const auto& cp : prof.criticals_star)
    stars.push_back({{"n", cp.n}, {"s_star", cp.s}, {"lambda_star", cp.s * cp.s}, {"kind", to_string(cp.kind)},
                     {"u_star", cp.value}});
  json j = {{"p", c.p()}, {"N", c.N()}, {"tol", cfg.tol}, {"t0", prof.t0}, {"c1", prof.c1}, {"stars", stars}};

  const fs::path dir(cfg.out);
  io::write_atomic(dir / "singular.csv", t.str());
  io::write_atomic(dir / "stars.json", dump(j));
  return kOk;
}

int cmd_branch(const io::RunConfig& cfg) {
  const DerivedConstants c = derive(cfg.p, cfg.N);
  const int n = cfg.n;
  std::optional<SingularProfile> prof;
  if (is_supercritical(c.regime)) {
    try {
      prof = compute_singular(c, n, cfg.tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::HorizonExceeded) throw;
    }
  }
  BranchOptions o;
  o.tol = cfg.tol;
  o.profile = prof ? &*prof : nullptr;
  const BranchCurve cur = trace_branch(c, n, {cfg.gamma_min, cfg.gamma_max, 1e-3}, o);

  const double lstar = cur.lambda_star.value_or(std::numeric_limits<double>::quiet_NaN());
  io::CsvTable t{{"gamma", "lambda", "lambda_minus_star"}, {}};
  for (const auto& s : cur.samples()) t.rows.push_back({s.gamma, s.lambda, s.lambda - lstar});

  json j = {{"n", n},
            {"p", c.p()},
            {"N", c.N()},
            {"regime", to_string(c.regime)},
            {"lambda_bar", bifurcation_point(c, n)},
            {"turning_points", cur.turning_points},
            {"evaluations", cur.evaluations}};
  j["lambda_star"] = cur.lambda_star ? json(*cur.lambda_star) : json(nullptr);

  int code = kOk;
  std::string status;
  if (!prof || cfg.gamma_max < 1e5) {
    status = "not-applicable";
    j["crossing_gammas"] = cur.crossings;
  } else {
    try {
      const OscillationReport rep = detect_oscillation(c, cur, *prof, o);
      json ec = json::array();
      for (const auto& e : rep.endpoint_crossings)
        ec.push_back({{"gamma", e.gamma}, {"slope", e.slope}, {"lambda_minus_star", e.lambda_minus_star},
                      {"parity_ok", e.parity_ok}});
      // Outside the spiral regime an empty report is an expected outcome.
      status = rep.status == OscillationStatus::Oscillating ? "oscillating" : "no-crossing";
      j["crossing_gammas"] = rep.crossing_gammas;
      j["signs_after"] = rep.signs_after;
      j["alternating"] = rep.alternating;
      j["matches_S1E8"] = rep.matches_S1E8;
      j["endpoint_crossings"] = ec;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCrossingFound) throw;
      status = "no-crossing";
      j["crossing_gammas"] = json::array();
      code = kNumerical;
    }
  }
  j["status"] = status;

  const fs::path dir(cfg.out);
  const std::string suffix = std::to_string(n);
  io::write_atomic(dir / ("branch_" + suffix + ".csv"), t.str());
  io::write_atomic(dir / ("oscillation_" + suffix + ".json"), dump(j));
  return code;
}

int cmd_verify(const io::RunConfig& cfg) {
  const VerifyReport rep = run_verify(cfg.p, cfg.N, cfg.tol);
  json checks = json::array();
  for (const auto& ch : rep.checks) {
    json x = {{"name", ch.name}, {"status", to_string(ch.status)}, {"detail", ch.detail}};
    x["value"] = std::isfinite(ch.value) ? json(ch.value) : json(nullptr);
    x["threshold"] = std::isfinite(ch.threshold) ? json(ch.threshold) : json(nullptr);
    checks.push_back(x);
    std::printf("%-32s %s\n", ch.name.c_str(), std::string(to_string(ch.status)).c_str());
  }
  json j = {{"p", rep.p}, {"N", rep.N}, {"regime", to_string(rep.regime)}, {"tol", cfg.tol},
            {"passed", rep.passed()}, {"checks", checks}};
  io::write_atomic(fs::path(cfg.out) / "verify.json", dump(j));
  return rep.passed() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial Neumann bifurcation diagrams for u'' + (N-1)/s u' - u + u^p = 0"};
  app.require_subcommand(1);
  Overrides o;
  auto* constants = app.add_subcommand("constants", "print derived constants and the regime");
  auto* singular = app.add_subcommand("singular", "singular profile: singular.csv, stars.json");
  auto* branch = app.add_subcommand("branch", "trace branch n: branch_<n>.csv, oscillation_<n>.json");
  auto* verify = app.add_subcommand("verify", "run the invariant suite: verify.json");
  add_common(constants, o, false, false);
  add_common(singular, o, false, true);
  add_common(branch, o, true, true);
  add_common(verify, o, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    const io::RunConfig cfg = resolve(o);
    if (*constants) return cmd_constants(cfg);
    if (*singular) return cmd_singular(cfg);
    if (*branch) return cmd_branch(cfg);
    if (*verify) return cmd_verify(cfg);
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_numerical() ? kNumerical : kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
