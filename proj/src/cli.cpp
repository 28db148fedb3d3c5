#include "levy_replenish/cli.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "levy_replenish/barrier_solver.hpp"
#include "levy_replenish/errors.hpp"
#include "levy_replenish/policy_simulator.hpp"
#include "levy_replenish/spec_io.hpp"
#include "levy_replenish/valuation.hpp"
#include "levy_replenish/verifier.hpp"

#ifndef LEVY_REPLENISH_VERSION
#define LEVY_REPLENISH_VERSION "0.0.0"
#endif

namespace levy_replenish {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::string spec_path;
  std::optional<double> b;
  std::optional<std::string> x;
  std::string param;
  std::string values;
  std::optional<std::size_t> paths;
  std::optional<double> horizon;
  double dt = 1e-3;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string format;
  bool compare_classical = false;
  bool compare_formula = false;
  bool antithetic = false;
  std::string integration = "exact";
  std::string checks;
  std::optional<double> tol;
  std::string trace_path;
  std::size_t trace_paths = 1;
  unsigned threads = 0;
  double rtol = 1e-10;
  double atol = 1e-12;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    item = item.substr(first, item.find_last_not_of(" \t") - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw UsageError(std::string("cannot parse \"") + item + "\" in " + flag);
    out.push_back(v);
  }
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json resolved_options(const std::string& sub, const Options& o) {
  json j = {{"format", o.format}, {"rtol", o.rtol}, {"atol", o.atol}};
  if (o.b) j["b"] = *o.b;
  if (o.x) j["x"] = *o.x;
  if (sub == "sweep") {
    j["param"] = o.param;
    j["values"] = o.values;
  }
  if (sub == "simulate" || sub == "verify") {
    j["paths"] = *o.paths;
    if (o.seed) j["seed"] = *o.seed;
    j["dt"] = o.dt;
  }
  if (sub == "simulate") {
    j["horizon"] = o.horizon ? json(*o.horizon) : json("auto");
    j["antithetic"] = o.antithetic;
    j["integration"] = o.integration;
    j["compare_formula"] = o.compare_formula;
  }
  if (sub == "solve") j["compare_classical"] = o.compare_classical;
  if (sub == "verify") {
    j["checks"] = o.checks;
    if (o.tol) j["tol"] = *o.tol;
  }
  return j;
}

class Emitter {
 public:
  Emitter(std::string sub, const Options& opt, std::ostream& out) : sub_(std::move(sub)), opt_(opt), out_(out) {}

  void write_main(const std::string& text) {
    if (opt_.out_path.empty()) {
      out_ << text;
      return;
    }
    write_file(opt_.out_path, text);
  }
  void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path);
    outputs_.push_back(path);
  }
  /// Writes <first output>.manifest.json describing the run, when any file was written.
  void finish() {
    if (outputs_.empty()) return;
    const json m = {{"subcommand", sub_},
                    {"spec", opt_.spec_path},
                    {"options", resolved_options(sub_, opt_)},
                    {"version", LEVY_REPLENISH_VERSION},
                    {"timestamp", utc_timestamp()},
                    {"outputs", outputs_}};
    std::ofstream f(outputs_.front() + ".manifest.json");
    if (!f) throw std::runtime_error("cannot write manifest for " + outputs_.front());
    f << m.dump(2) << '\n';
    spdlog::info("wrote {} output file(s), manifest {}.manifest.json", outputs_.size(), outputs_.front());
  }

 private:
  std::string sub_;
  const Options& opt_;
  std::ostream& out_;
  std::vector<std::string> outputs_;
};

QuadratureConfig quad_config(const Options& o) {
  QuadratureConfig c;
  c.rtol = o.rtol;
  c.atol = o.atol;
  return c;
}

void require_format(const Options& o) {
  if (o.format != "csv" && o.format != "json") throw UsageError("--format must be csv or json");
}

int cmd_solve(const Options& o, Emitter& em) {
  Valuator val(validate(load_problem_spec(o.spec_path)), quad_config(o));
  const SolveResult s = solve_bstar(val);
  std::optional<double> classical;
  if (o.compare_classical) classical = classical_bstar(val.spec());
  spdlog::info("b* = {} (residual {})", s.b_star, s.residual);
  if (o.format == "json") {
    json j = to_json(s);
    if (classical) {
      j["classical_b_star"] = *classical;
      j["classical_difference"] = s.b_star - *classical;
    }
    em.write_main(j.dump(2) + "\n");
  } else {
    std::string text = "b_star,residual,bracket_lo,bracket_hi,iterations,closed_form,classical_b_star\n";
    text += num(s.b_star) + "," + num(s.residual) + "," + num(s.bracket_lo) + "," + num(s.bracket_hi) + "," +
            std::to_string(s.iterations) + "," + (s.closed_form_available ? num(s.closed_form) : "") + "," +
            (classical ? num(*classical) : "") + "\n";
    em.write_main(text);
  }
  return kExitOk;
}

int cmd_value(const Options& o, Emitter& em) {
  Valuator val(validate(load_problem_spec(o.spec_path)), quad_config(o));
  const double b = o.b ? *o.b : solve_bstar(val).b_star;
  const std::vector<double> xs = o.x ? parse_list(*o.x, "--x") : std::vector<double>{b};
  const BarrierTerms t = val.barrier_terms(b);
  if (o.format == "json") {
    json arr = json::array();
    for (double x : xs) arr.push_back(to_json(val.report(t, x)));
    em.write_main(arr.dump(2) + "\n");
  } else {
    std::string text = csv_header() + "\n";
    for (double x : xs) text += to_csv_row(val.report(t, x)) + "\n";
    em.write_main(text);
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, Emitter& em) {
  if (!o.seed) throw UsageError("simulate requires --seed");
  if (*o.paths == 0) throw UsageError("--paths must be positive");
  if (!(o.dt > 0.0)) throw UsageError("--dt must be positive");
  if (o.horizon && !(*o.horizon >= 0.0)) throw UsageError("--horizon must be non-negative");
  if (o.antithetic && *o.paths % 2 != 0) throw UsageError("--antithetic needs an even --paths");
  if (o.integration != "exact" && o.integration != "left") throw UsageError("--integration must be exact or left");
  Valuator val(validate(load_problem_spec(o.spec_path)), quad_config(o));
  const double b = o.b ? *o.b : solve_bstar(val).b_star;
  std::vector<double> xs = o.x ? parse_list(*o.x, "--x") : std::vector<double>{b};
  if (xs.size() != 1) throw UsageError("simulate takes a single starting point in --x");
  const double x0 = xs.front();

  SimConfig cfg;
  cfg.paths = *o.paths;
  cfg.horizon = o.horizon;
  cfg.dt = o.dt;
  cfg.seed = *o.seed;
  cfg.antithetic = o.antithetic;
  cfg.integration = o.integration == "left" ? CostIntegration::kLeftEndpoint : CostIntegration::kExactSegments;
  cfg.threads = o.threads;
  cfg.trace_paths = o.trace_path.empty() ? 0 : o.trace_paths;
  const ValueEstimate est = estimate_value(val.spec(), b, x0, cfg);
  spdlog::info("simulated {} paths in {:.2f} s", est.total.paths, est.total.wall_clock);

  std::optional<double> formula;
  if (o.compare_formula) formula = val.value(b, x0);
  if (o.format == "json") {
    json j = to_json(est);
    j["b"] = b;
    j["x0"] = x0;
    j["seed"] = *o.seed;
    if (formula) {
      j["formula"] = {{"value", *formula},
                      {"abs_diff", std::abs(est.total.mean - *formula)},
                      {"diff_over_se", std::abs(est.total.mean - *formula) / est.total.se}};
    }
    for (const char* key : {"total", "inventory", "replenishment"}) j[key].erase("wall_clock_seconds");
    em.write_main(j.dump(2) + "\n");
  } else {
    std::string text =
        "b,x0,mean,se,paths,horizon,truncation_bound,dt_bound,inventory,replenishment,mean_replenishments,formula,"
        "diff_over_se\n";
    text += num(b) + "," + num(x0) + "," + num(est.total.mean) + "," + num(est.total.se) + "," +
            std::to_string(est.total.paths) + "," + num(est.total.horizon) + "," + num(est.total.truncation_bound) +
            "," + num(est.total.dt_bound) + "," + num(est.inventory.mean) + "," + num(est.replenishment.mean) + "," +
            num(est.mean_replenishments) + "," + (formula ? num(*formula) : "") + "," +
            (formula ? num(std::abs(est.total.mean - *formula) / est.total.se) : "") + "\n";
    em.write_main(text);
  }
  if (!o.trace_path.empty()) em.write_file(o.trace_path, trace_csv(est.trace));
  return kExitOk;
}

int cmd_sweep(const Options& o, Emitter& em) {
  const SweepParam param = parse_sweep_param(o.param);
  const std::vector<double> values = parse_list(o.values, "--values");
  if (values.empty()) throw UsageError("--values must list at least one value");
  const std::vector<double> xs = o.x ? parse_list(*o.x, "--x") : std::vector<double>{};
  const ValidatedSpec spec = validate(load_problem_spec(o.spec_path));
  const SweepResult s = sweep(spec, param, values, xs, quad_config(o));
  if (o.format == "json") {
    json rows = json::array();
    for (const auto& r : s.rows) {
      json row = {{"param_value", r.param_value}, {"status", r.ok ? "ok" : "error"}};
      if (r.ok) {
        row["b_star"] = r.b;
        row["residual"] = r.residual;
        row["values"] = r.values;
      } else {
        row["error"] = r.error;
      }
      rows.push_back(row);
    }
    json j = {{"param", sweep_param_name(param)}, {"x", xs}, {"rows", rows}};
    if (s.b_decreasing) j["b_star_decreasing"] = *s.b_decreasing;
    if (s.value_monotone) j["value_monotone"] = *s.value_monotone;
    if (s.minimum_at_bstar) j["minimum_at_b_star"] = *s.minimum_at_bstar;
    if (s.minimum_at_bstar) j["b_star"] = s.b_star;
    em.write_main(j.dump(2) + "\n");
  } else {
    em.write_main(sweep_csv(s));
  }
  for (const auto& r : s.rows)
    if (!r.ok) return kExitNumerical;
  return kExitOk;
}

int cmd_verify(const Options& o, Emitter& em) {
  if (!o.seed) throw UsageError("verify requires --seed");
  if (*o.paths < 2) throw UsageError("--paths must be at least 2 for verify");
  if (!(o.dt > 0.0)) throw UsageError("--dt must be positive");
  std::vector<std::string> names;
  if (o.checks.empty()) {
    names = available_checks();
  } else {
    std::stringstream ss(o.checks);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) names.push_back(item);
  }
  for (const auto& n : names) {
    const auto& all = available_checks();
    if (std::find(all.begin(), all.end(), n) == all.end()) {
      std::string list;
      for (const auto& a : all) list += (list.empty() ? "" : ", ") + a;
      throw UsageError("unknown check \"" + n + "\"; available checks: " + list);
    }
  }
  Valuator val(validate(load_problem_spec(o.spec_path)), quad_config(o));
  VerifyOptions vo;
  vo.seed = *o.seed;
  vo.paths = *o.paths;
  vo.tolerance = o.tol;
  vo.threads = o.threads;
  vo.dt = o.dt;
  const std::vector<CheckReport> reports = run_checks(val, names, o.b, vo);
  bool all_pass = true;
  std::string text;
  if (o.format == "json") {
    for (const auto& r : reports) {
      all_pass = all_pass && r.pass;
      text += to_json(r).dump() + "\n";
    }
  } else {
    text = "name,residual,tolerance,pass\n";
    for (const auto& r : reports) {
      all_pass = all_pass && r.pass;
      text += r.name + "," + num(r.max_residual) + "," + num(r.tolerance) + "," + (r.pass ? "true" : "false") + "\n";
    }
  }
  em.write_main(text);
  return all_pass ? kExitOk : kExitCheckFailed;
}

void configure_logging(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err);
  auto logger = std::make_shared<spdlog::logger>("levy-replenish", sink);
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("LEVY_REPLENISH_LOG")) {
    const std::string s(env);
    if (!s.empty()) level = spdlog::level::from_str(s);
  }
  logger->set_level(level);
  spdlog::set_default_logger(logger);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging(err);
  CLI::App app{"Optimal periodic barrier replenishment for spectrally negative Levy inventory",
               "levy-replenish"};
  app.set_version_flag("--version", std::string(LEVY_REPLENISH_VERSION));
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, const std::string& default_format) {
    sub->add_option("--spec", o.spec_path, "problem specification (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_path, "write the result to this file (plus a .manifest.json)");
    sub->add_option("--format", o.format, "csv or json (default: " + default_format + ")");
    sub->add_option("--rtol", o.rtol, "quadrature relative tolerance")->default_val(1e-10);
    sub->add_option("--atol", o.atol, "quadrature absolute tolerance")->default_val(1e-12);
  };
  auto threads = [&](CLI::App* sub) { sub->add_option("--threads", o.threads, "worker threads (0: all cores)"); };

  CLI::App* solve = app.add_subcommand("solve", "optimal barrier b*");
  common(solve, "json");
  solve->add_flag("--compare-classical", o.compare_classical, "also solve the continuous-monitoring limit");

  CLI::App* value = app.add_subcommand("value", "value function on an x grid");
  common(value, "csv");
  value->add_option("--b", o.b, "barrier (default: b*)");
  value->add_option("--x", o.x, "comma-separated x grid (default: b)");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the policy cost");
  common(simulate, "json");
  simulate->add_option("--b", o.b, "barrier (default: b*)");
  simulate->add_option("--x", o.x, "starting inventory (default: b)");
  simulate->add_option("--paths", o.paths, "number of paths (default: 10000)");
  simulate->add_option("--horizon", o.horizon, "time horizon (default: truncation rule)");
  simulate->add_option("--dt", o.dt, "grid step for Gaussian increments and the left-endpoint rule")->default_val(1e-3);
  simulate->add_option("--seed", o.seed, "random seed")->required();
  simulate->add_flag("--antithetic", o.antithetic, "antithetic path pairs");
  simulate->add_option("--integration", o.integration, "cost integration: exact or left")->default_val("exact");
  simulate->add_flag("--compare-formula", o.compare_formula, "report |estimate - v| / SE");
  simulate->add_option("--trace", o.trace_path, "write event traces of the first paths to this CSV");
  simulate->add_option("--trace-paths", o.trace_paths, "number of traced paths")->default_val(1);
  threads(simulate);

  CLI::App* sw = app.add_subcommand("sweep", "b* and v over a parameter range");
  common(sw, "csv");
  sw->add_option("--param", o.param, "C, r or b")->required();
  sw->add_option("--values", o.values, "comma-separated parameter values")->required();
  sw->add_option("--x", o.x, "comma-separated x grid for v");

  CLI::App* verify = app.add_subcommand("verify", "numerical optimality and identity checks");
  common(verify, "json");
  verify->add_option("--b", o.b, "barrier (default: b*)");
  verify->add_option("--checks", o.checks, "comma-separated check names (default: all)");
  verify->add_option("--tol", o.tol, "override the leading tolerance of every check");
  verify->add_option("--paths", o.paths, "Monte Carlo paths for the resolvent checks (default: 100000)");
  verify->add_option("--seed", o.seed, "random seed")->required();
  verify->add_option("--dt", o.dt, "grid step of the killed Gaussian simulations")->default_val(1e-3);
  threads(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  if (o.format.empty()) o.format = chosen == value || chosen == sw ? "csv" : "json";
  if (!o.paths) o.paths = chosen == verify ? 100000 : 10000;
  try {
    require_format(o);
    Emitter em(name, o, out);
    int rc = kExitOk;
    if (chosen == solve) rc = cmd_solve(o, em);
    if (chosen == value) rc = cmd_value(o, em);
    if (chosen == simulate) rc = cmd_simulate(o, em);
    if (chosen == sw) rc = cmd_sweep(o, em);
    if (chosen == verify) rc = cmd_verify(o, em);
    em.finish();
    return rc;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidSpec;
  } catch (const SpecParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidSpec;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace levy_replenish
