// proxgrad: run, check and compare proximal gradient solves from config files.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxgrad/proxgrad.hpp"

namespace fs = std::filesystem;
using namespace proxgrad;

namespace {

enum ExitCode : int {
  kOk = 0,
  kError = 1,
  kMaxOuter = 2,
  kInnerCap = 3,
  kCheckFailed = 4,
};

enum class LogLevel { quiet, info, debug };

LogLevel log_level() {
  const char* env = std::getenv("PROXGRAD_LOG");
  if (env == nullptr) return LogLevel::info;
  const std::string v = env;
  if (v == "quiet") return LogLevel::quiet;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::info;
}

void log_info(const std::string& msg) {
  if (log_level() != LogLevel::quiet) std::cerr << "[proxgrad] " << msg << '\n';
}

void log_debug(const std::string& msg) {
  if (log_level() == LogLevel::debug) std::cerr << "[proxgrad:debug] " << msg << '\n';
}

fs::path config_dir() {
  if (const char* env = std::getenv("PROXGRAD_CONFIG_DIR")) return env;
#ifdef PROXGRAD_CONFIG_DIR
  return PROXGRAD_CONFIG_DIR;
#else
  return "configs";
#endif
}

// A bare name such as "lasso_small" resolves against the shipped configs.
fs::path resolve_config(const std::string& arg) {
  const fs::path p(arg);
  if (fs::exists(p)) return p;
  for (const fs::path candidate : {config_dir() / arg, config_dir() / (arg + ".json")}) {
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged_residual:
    case SolveStatus::converged_step: return kOk;
    case SolveStatus::max_outer_reached: return kMaxOuter;
    case SolveStatus::inner_loop_cap: return kInnerCap;
  }
  return kError;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void report_warnings(const SolveReport& rep) {
  for (const auto& w : rep.warnings) log_info("warning: " + w);
}

int cmd_run(const std::string& config_arg, const std::string& trace_override) {
  const RunConfig cfg = load_run_config(resolve_config(config_arg));
  log_debug("problem " + cfg.problem.name() + ", dimension " + std::to_string(cfg.problem.dimension()) +
            ", m = " + std::to_string(cfg.solver.m));
  const SolveReport rep = solve(cfg.problem, cfg.solver, cfg.x0);
  report_warnings(rep);
  const fs::path out = trace_override.empty() ? fs::path(cfg.output) : fs::path(trace_override);
  write_trace(out, rep.trace);
  log_debug("trace written to " + out.string());

  const double final_psi = psi_eval(cfg.problem, rep.x_final).value();
  std::cout << "status=" << to_string(rep.status) << " k=" << rep.outer_iterations()
            << " psi=" << fmt(final_psi) << " residual=" << fmt(rep.final_residual);
  if (rep.cap_iteration) std::cout << " cap_at=" << *rep.cap_iteration;
  if (rep.early_inner_exit) std::cout << " early_inner_exit=true";
  std::cout << '\n';
  return exit_code_for(rep.status);
}

struct CheckOptions {
  std::optional<std::size_t> m;
  std::optional<double> delta;
  double step_tol = 1e-6;
  double product_tol = 1e-5;
  double gamma_bound = 1e6;
};

int cmd_check(const std::string& trace_path, const CheckOptions& opt) {
  bool has_meta = false;
  const Trace trace = read_trace(trace_path, &has_meta);
  CheckSettings s = settings_from(trace);
  if (!has_meta) log_info("no sidecar metadata for " + trace_path + "; using default solver parameters");
  if (opt.m) s.m = *opt.m;
  if (opt.delta) s.delta = *opt.delta;
  s.step_tol = opt.step_tol;
  s.product_tol = opt.product_tol;
  s.gamma_bound = opt.gamma_bound;

  bool all_pass = true;
  for (const auto& c : run_all_checks(trace, s)) {
    const char* verdict = c.informational ? "info" : (c.passed ? "pass" : "FAIL");
    std::cout << c.name << ' ' << verdict << ' ' << c.detail << '\n';
    if (!c.informational && !c.passed) all_pass = false;
  }
  return all_pass ? kOk : kCheckFailed;
}

struct CompareRow {
  std::size_t m = 0;
  SolveReport report;
  double final_psi = 0.0;
};

int cmd_compare(const std::string& config_arg, const std::vector<std::size_t>& ms,
                const std::string& output, const std::string& trace_dir) {
  const RunConfig cfg = load_run_config(resolve_config(config_arg));

  std::vector<std::future<CompareRow>> jobs;
  jobs.reserve(ms.size());
  for (std::size_t m : ms) {
    jobs.push_back(std::async(std::launch::async, [&cfg, m] {
      SolverConfig sc = cfg.solver;
      sc.m = m;
      CompareRow row{m, solve(cfg.problem, sc, cfg.x0), 0.0};
      row.final_psi = psi_eval(cfg.problem, row.report.x_final).value();
      return row;
    }));
  }
  std::vector<CompareRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());

  std::ofstream file;
  if (!output.empty()) {
    file.open(output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open '" + output + "' for writing");
  }
  std::ostream& os = output.empty() ? std::cout : file;
  os << "m,status,outer_iters,total_inner_iters,final_psi\n";
  int code = kOk;
  for (const auto& r : rows) {
    std::size_t inner = 0;
    for (const auto& rec : r.report.trace.records) inner += rec.inner_iters.value_or(0);
    os << r.m << ',' << to_string(r.report.status) << ',' << r.report.outer_iterations() << ','
       << inner << ',' << detail::format_double(r.final_psi) << '\n';
    report_warnings(r.report);
    code = std::max(code, exit_code_for(r.report.status));
    if (!trace_dir.empty()) {
      fs::create_directories(trace_dir);
      write_trace(fs::path(trace_dir) / (cfg.name + ".m" + std::to_string(r.m) + ".trace.csv"),
                  r.report.trace);
    }
  }
  return code;
}

int cmd_list() {
  std::cout << "smooth:";
  for (const auto& [name, _] : smooth_registry()) std::cout << ' ' << name;
  std::cout << "\nnonsmooth:";
  for (const auto& [name, _] : prox_registry()) std::cout << ' ' << name;
  std::cout << "\nconfigs:";
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(config_dir(), ec)) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  for (const auto& n : names) std::cout << ' ' << n;
  std::cout << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monotone and nonmonotone proximal gradient solver"};
  app.require_subcommand(1);

  std::string config_arg;
  std::string trace_override;
  auto* run = app.add_subcommand("run", "Solve a configured problem and write its trace");
  run->add_option("config", config_arg, "Config file or shipped config name")->required();
  run->add_option("--trace", trace_override, "Trace output path (overrides the config)");

  std::string trace_path;
  CheckOptions check_opt;
  auto* check = app.add_subcommand("check", "Verify the invariants of a trace file");
  check->add_option("trace", trace_path, "Trace CSV")->required();
  check->add_option("--m", check_opt.m, "Window size of the run (default: from sidecar)");
  check->add_option("--delta", check_opt.delta, "Sufficient-decrease constant (default: from sidecar)");
  check->add_option("--step-tol", check_opt.step_tol, "Vanishing-step threshold");
  check->add_option("--product-tol", check_opt.product_tol, "gamma*step threshold");
  check->add_option("--gamma-bound", check_opt.gamma_bound, "Reported bound on accepted gamma");

  std::vector<std::size_t> ms;
  std::string compare_out;
  std::string trace_dir;
  auto* compare = app.add_subcommand("compare", "Run one config for several window sizes");
  compare->add_option("config", config_arg, "Config file or shipped config name")->required();
  compare->add_option("--m", ms, "Window sizes, e.g. --m 0,1,5")->required()->delimiter(',');
  compare->add_option("--output", compare_out, "Comparison CSV path (default: stdout)");
  compare->add_option("--trace-dir", trace_dir, "Also write one trace per window size here");

  auto* list = app.add_subcommand("list", "List registered oracles and shipped configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (*run) return cmd_run(config_arg, trace_override);
    if (*check) return cmd_check(trace_path, check_opt);
    if (*compare) return cmd_compare(config_arg, ms, compare_out, trace_dir);
    if (*list) return cmd_list();
  } catch (const std::exception& e) {
    std::cerr << "proxgrad: error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
