#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "proxgrad/core.hpp"
#include "proxgrad/solver_config.hpp"

namespace proxgrad {

/// One outer iteration. State columns (f, phi, psi, residual) describe x^k;
/// step columns (gamma0 ... accepted_ref) describe the step x^k -> x^{k+1}.
///
/// Empty optionals: `residual` at k = 0 (no previous iterate), and the step
/// columns on the terminal row, where no step was accepted. A terminal row
/// that hit the inner-loop cap or the early inner exit still carries gamma0,
/// inner_iters and accepted_ref of the abandoned attempt.
struct IterateRecord {
  std::size_t k = 0;
  double f = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  std::optional<double> gamma0;
  std::optional<double> gamma;
  std::optional<std::size_t> inner_iters;
  std::optional<double> step_norm;
  std::optional<double> residual;
  std::optional<double> accepted_ref;

  [[nodiscard]] bool has_step() const noexcept { return gamma.has_value() && step_norm.has_value(); }

  friend bool operator==(const IterateRecord&, const IterateRecord&) = default;
};

struct Trace {
  std::vector<IterateRecord> records;
  SolverConfig config_echo;
  std::string problem_name;
  std::string x0_hash;

  friend bool operator==(const Trace&, const Trace&) = default;
};

class TraceFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kTraceHeader =
    "k,f,phi,psi,gamma0,gamma,inner_iters,step_norm,residual,accepted_ref";

/// FNV-1a over the IEEE bit patterns of the coordinates, as 16 hex digits.
inline std::string point_hash(const Vector& x) {
  std::uint64_t h = 1469598103934665603ULL;
  for (double c : x) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &c, sizeof bits);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

inline double parse_double(std::string_view s, std::size_t line, const char* column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw TraceFormatError("trace line " + std::to_string(line) + ": bad " + column + " value '" +
                           std::string(s) + "'");
  }
  return v;
}

inline std::size_t parse_index(std::string_view s, std::size_t line, const char* column) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw TraceFormatError("trace line " + std::to_string(line) + ": bad " + column + " value '" +
                           std::string(s) + "'");
  }
  return v;
}

inline std::optional<double> parse_opt(std::string_view s, std::size_t line, const char* column) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, line, column);
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    os << r.k << ',' << detail::format_double(r.f) << ',' << detail::format_double(r.phi) << ','
       << detail::format_double(r.psi) << ',' << detail::format_opt(r.gamma0) << ','
       << detail::format_opt(r.gamma) << ','
       << (r.inner_iters ? std::to_string(*r.inner_iters) : std::string{}) << ','
       << detail::format_opt(r.step_norm) << ',' << detail::format_opt(r.residual) << ','
       << detail::format_opt(r.accepted_ref) << '\n';
  }
}

/// Parses the CSV body. Rows must be numbered 0..K-1 contiguously.
inline std::vector<IterateRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw TraceFormatError("trace: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw TraceFormatError("trace: unexpected header '" + line + "'");

  std::vector<IterateRecord> records;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = detail::split_csv(line);
    if (cols.size() != 10) {
      throw TraceFormatError("trace line " + std::to_string(lineno) + ": expected 10 fields, got " +
                             std::to_string(cols.size()));
    }
    IterateRecord r;
    r.k = detail::parse_index(cols[0], lineno, "k");
    r.f = detail::parse_double(cols[1], lineno, "f");
    r.phi = detail::parse_double(cols[2], lineno, "phi");
    r.psi = detail::parse_double(cols[3], lineno, "psi");
    r.gamma0 = detail::parse_opt(cols[4], lineno, "gamma0");
    r.gamma = detail::parse_opt(cols[5], lineno, "gamma");
    if (!cols[6].empty()) r.inner_iters = detail::parse_index(cols[6], lineno, "inner_iters");
    r.step_norm = detail::parse_opt(cols[7], lineno, "step_norm");
    r.residual = detail::parse_opt(cols[8], lineno, "residual");
    r.accepted_ref = detail::parse_opt(cols[9], lineno, "accepted_ref");
    if (r.k != records.size()) {
      throw TraceFormatError("trace line " + std::to_string(lineno) + ": row index " +
                             std::to_string(r.k) + " breaks contiguity (expected " +
                             std::to_string(records.size()) + ")");
    }
    records.push_back(r);
  }
  if (records.empty()) throw TraceFormatError("trace: no rows");
  return records;
}

// ---------------------------------------------------------------------------
// Sidecar metadata (config echo, problem name, start-point hash) lives next
// to the CSV as "<trace>.meta.json" so the CSV keeps its fixed header.

inline nlohmann::json to_json(const SolverConfig& c) {
  nlohmann::json j;
  j["tau"] = c.tau;
  j["gamma_min"] = c.gamma_min;
  j["gamma_max"] = c.gamma_max;
  j["delta"] = c.delta;
  j["m"] = c.m;
  j["gamma0_strategy"] = to_string(c.gamma0.rule);
  if (c.gamma0.rule == Gamma0Rule::constant) j["gamma0_value"] = c.gamma0.value;
  j["tau_abs"] = c.tau_abs;
  j["eps_step"] = c.eps_step;
  j["max_outer"] = c.max_outer;
  j["max_inner"] = c.max_inner;
  return j;
}

/// Reads solver fields; absent fields keep their defaults. Unknown fields
/// are rejected. Does not validate ranges (see `validate`).
inline SolverConfig solver_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("solver: expected a JSON object");
  SolverConfig c;
  for (const auto& [key, val] : j.items()) {
    auto num = [&]() {
      if (!val.is_number()) throw ConfigError("solver." + key + ": expected a number");
      return val.get<double>();
    };
    auto count = [&]() -> std::size_t {
      if (!val.is_number_integer() || val.get<long long>() < 0) {
        throw ConfigError("solver." + key + ": expected a nonnegative integer");
      }
      return val.get<std::size_t>();
    };
    if (key == "tau") c.tau = num();
    else if (key == "gamma_min") c.gamma_min = num();
    else if (key == "gamma_max") c.gamma_max = num();
    else if (key == "delta") c.delta = num();
    else if (key == "m") c.m = count();
    else if (key == "tau_abs") c.tau_abs = num();
    else if (key == "eps_step") c.eps_step = num();
    else if (key == "max_outer") c.max_outer = count();
    else if (key == "max_inner") c.max_inner = count();
    else if (key == "gamma0_value") c.gamma0.value = num();
    else if (key == "gamma0_strategy") {
      const auto s = val.is_string() ? val.get<std::string>() : std::string{};
      if (s == "constant") c.gamma0.rule = Gamma0Rule::constant;
      else if (s == "bb_safeguarded") c.gamma0.rule = Gamma0Rule::bb_safeguarded;
      else throw ConfigError("solver.gamma0_strategy: expected \"constant\" or \"bb_safeguarded\"");
    } else {
      throw ConfigError("solver: unknown field '" + key + "'");
    }
  }
  return c;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& trace_path) {
  return std::filesystem::path(trace_path.string() + ".meta.json");
}

inline void write_trace(const std::filesystem::path& path, const Trace& trace) {
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_trace_csv(os, trace);
  }
  nlohmann::json meta;
  meta["problem_name"] = trace.problem_name;
  meta["x0_hash"] = trace.x0_hash;
  meta["config"] = to_json(trace.config_echo);
  std::ofstream ms(sidecar_path(path), std::ios::binary);
  if (!ms) throw std::runtime_error("cannot open sidecar for '" + path.string() + "'");
  ms << meta.dump(2) << '\n';
}

/// Reads a trace file and, when present, its sidecar. Without a sidecar the
/// config echo holds defaults and `has_metadata` is set to false.
inline Trace read_trace(const std::filesystem::path& path, bool* has_metadata = nullptr) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TraceFormatError("cannot open trace '" + path.string() + "'");
  Trace t;
  t.records = read_trace_csv(is);
  const auto meta_path = sidecar_path(path);
  const bool found = std::filesystem::exists(meta_path);
  if (has_metadata) *has_metadata = found;
  if (found) {
    std::ifstream ms(meta_path, std::ios::binary);
    nlohmann::json meta;
    try {
      meta = nlohmann::json::parse(ms);
      t.problem_name = meta.at("problem_name").get<std::string>();
      t.x0_hash = meta.at("x0_hash").get<std::string>();
      t.config_echo = solver_config_from_json(meta.at("config"));
    } catch (const nlohmann::json::exception& e) {
      throw TraceFormatError("trace sidecar '" + meta_path.string() + "': " + e.what());
    } catch (const ConfigError& e) {
      throw TraceFormatError("trace sidecar '" + meta_path.string() + "': " + e.what());
    }
  }
  return t;
}

}  // namespace proxgrad
