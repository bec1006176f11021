#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "proxgrad/core.hpp"
#include "proxgrad/problem.hpp"
#include "proxgrad/prox_oracles.hpp"
#include "proxgrad/smooth_oracles.hpp"
#include "proxgrad/solver_config.hpp"
#include "proxgrad/trace.hpp"

// Run-config files and the name -> oracle registries they refer to.
//
//   {
//     "problem": {
//       "dimension": 2,
//       "smooth":    {"name": "quadratic", "params": {"A": [[1,0],[0,1]], "b": [1,0.1]}},
//       "nonsmooth": {"name": "l1", "params": {"lambda": 0.5}},
//       "psi_bounded_below": true
//     },
//     "solver": {"tau": 2, "m": 5, "gamma0_strategy": "bb_safeguarded", ...},
//     "x0": "zeros",
//     "output": "lasso_small.trace.csv"
//   }

namespace proxgrad {

using json = nlohmann::json;

namespace detail {

inline const json& require_field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

inline double param_number(const json& params, const char* key, const std::string& where) {
  const auto& v = require_field(params, key, where);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

inline Vector param_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + ": expected a nonempty array of numbers");
    out.push_back(e.get<double>());
  }
  try {
    return Vector(std::move(out));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline Matrix param_matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a nonempty array of rows");
  Matrix rows;
  for (const auto& r : v) rows.push_back(param_vector(r, where));
  return rows;
}

// A number is broadcast to every coordinate.
inline Vector param_bound(const json& v, std::size_t dimension, const std::string& where) {
  if (v.is_number()) return Vector(dimension, v.get<double>());
  return param_vector(v, where);
}

}  // namespace detail

using SmoothFactory = std::function<SmoothOracle(const json& params, std::size_t dimension)>;
using ProxFactory = std::function<ProxOracle(const json& params, std::size_t dimension)>;

inline const std::map<std::string, SmoothFactory>& smooth_registry() {
  static const std::map<std::string, SmoothFactory> registry = {
      {"quadratic",
       [](const json& p, std::size_t) {
         return make_quadratic(detail::param_matrix(detail::require_field(p, "A", "quadratic"), "quadratic.A"),
                               detail::param_vector(detail::require_field(p, "b", "quadratic"), "quadratic.b"));
       }},
      {"quartic", [](const json&, std::size_t n) { return make_quartic(n); }},
      {"logistic",
       [](const json& p, std::size_t) {
         const Vector y = detail::param_vector(detail::require_field(p, "labels", "logistic"), "logistic.labels");
         return make_logistic(detail::param_matrix(detail::require_field(p, "A", "logistic"), "logistic.A"),
                              y.values());
       }},
  };
  return registry;
}

inline const std::map<std::string, ProxFactory>& prox_registry() {
  static const std::map<std::string, ProxFactory> registry = {
      {"zero", [](const json&, std::size_t) { return make_zero_prox(); }},
      {"l1", [](const json& p, std::size_t) { return make_l1_prox(detail::param_number(p, "lambda", "l1")); }},
      {"l0", [](const json& p, std::size_t) { return make_l0_prox(detail::param_number(p, "lambda", "l0")); }},
      {"lp_half",
       [](const json& p, std::size_t) { return make_lp_half_prox(detail::param_number(p, "lambda", "lp_half")); }},
      {"box",
       [](const json& p, std::size_t n) {
         return make_box_prox(detail::param_bound(detail::require_field(p, "lo", "box"), n, "box.lo"),
                              detail::param_bound(detail::require_field(p, "hi", "box"), n, "box.hi"));
       }},
      {"sphere",
       [](const json& p, std::size_t) { return make_sphere_prox(detail::param_number(p, "radius", "sphere")); }},
  };
  return registry;
}

struct RunConfig {
  std::string name;
  CompositeProblem problem;
  SolverConfig solver;
  Vector x0;
  std::string output;
};

/// Builds and validates a run config. Every name must resolve, the solver
/// parameters must satisfy `validate`, and psi(x0) must be finite.
inline RunConfig parse_run_config(const json& j, std::string name) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  const auto& pj = detail::require_field(j, "problem", "config");
  const auto& dim_j = detail::require_field(pj, "dimension", "problem");
  if (!dim_j.is_number_integer() || dim_j.get<long long>() < 1) {
    throw ConfigError("problem.dimension: expected a positive integer");
  }
  const auto dimension = dim_j.get<std::size_t>();

  auto resolve = [&](const char* role, const auto& registry) {
    const auto& oj = detail::require_field(pj, role, "problem");
    const auto& nj = detail::require_field(oj, "name", std::string("problem.") + role);
    const std::string oname = nj.is_string() ? nj.get<std::string>() : std::string{};
    const auto it = registry.find(oname);
    if (it == registry.end()) {
      throw ConfigError(std::string("problem.") + role + ": unknown oracle '" + oname + "'");
    }
    const json params = oj.contains("params") ? oj.at("params") : json::object();
    try {
      return it->second(params, dimension);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("problem.") + role + ": " + e.what());
    }
  };
  SmoothOracle smooth = resolve("smooth", smooth_registry());
  ProxOracle prox = resolve("nonsmooth", prox_registry());

  bool bounded_below = true;
  if (pj.contains("psi_bounded_below")) {
    if (!pj.at("psi_bounded_below").is_boolean()) {
      throw ConfigError("problem.psi_bounded_below: expected a boolean");
    }
    bounded_below = pj.at("psi_bounded_below").get<bool>();
  }

  std::optional<CompositeProblem> problem;
  try {
    problem = CompositeProblem::from_oracles(std::move(smooth), std::move(prox), dimension,
                                             bounded_below, name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  SolverConfig solver = j.contains("solver") ? solver_config_from_json(j.at("solver")) : SolverConfig{};
  validate(solver);

  Vector x0;
  const json x0j = j.contains("x0") ? j.at("x0") : json("zeros");
  if (x0j.is_string()) {
    const auto preset = x0j.get<std::string>();
    if (preset == "zeros") x0 = Vector(dimension, 0.0);
    else if (preset == "ones") x0 = Vector(dimension, 1.0);
    else throw ConfigError("x0: unknown preset '" + preset + "' (expected zeros, ones or a list)");
  } else {
    x0 = detail::param_vector(x0j, "x0");
  }
  if (x0.size() != dimension) {
    throw ConfigError("x0: has " + std::to_string(x0.size()) + " coordinates, problem dimension is " +
                      std::to_string(dimension));
  }
  if (psi_eval(*problem, x0).is_infinite()) {
    throw ConfigError("x0 ∉ dom φ: psi(x0) = +inf for nonsmooth term '" + problem->nonsmooth().name + "'");
  }

  std::string output = name + ".trace.csv";
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("output: expected a path string");
    output = j.at("output").get<std::string>();
  }

  return RunConfig{std::move(name), std::move(*problem), solver, std::move(x0), std::move(output)};
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return parse_run_config(j, path.stem().string());
}

}  // namespace proxgrad
