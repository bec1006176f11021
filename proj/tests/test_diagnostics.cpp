#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "proxgrad/diagnostics.hpp"
#include "proxgrad/solver.hpp"

using namespace proxgrad;

namespace {

// Synthetic trace from psi values; every non-terminal row gets the given
// gamma and step.
Trace make_trace(const std::vector<double>& psi, double gamma = 1.0, double step = 0.0) {
  Trace t;
  for (std::size_t k = 0; k < psi.size(); ++k) {
    IterateRecord r;
    r.k = k;
    r.f = psi[k];
    r.psi = psi[k];
    if (k + 1 < psi.size()) {
      r.gamma0 = gamma;
      r.gamma = gamma;
      r.inner_iters = 0;
      r.step_norm = step;
      r.accepted_ref = psi[k];
    }
    if (k > 0) r.residual = 1.0;
    t.records.push_back(r);
  }
  return t;
}

Trace lasso_trace() {
  const auto p = CompositeProblem::from_oracles(
      make_quadratic({Vector{1.0, 0.0}, Vector{0.0, 1.0}}, Vector{1.0, 0.1}), make_l1_prox(0.5), 2);
  SolverConfig c;
  c.m = 0;
  c.gamma0 = Gamma0Strategy::constant(0.01);
  c.tau_abs = 1e-8;
  return solve(p, c, Vector{0.0, 0.0}).trace;
}

std::string to_csv(const Trace& t) {
  std::ostringstream os;
  write_trace_csv(os, t);
  return os.str();
}

std::vector<IterateRecord> from_csv(const std::string& s) {
  std::istringstream is(s);
  return read_trace_csv(is);
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() /
             ("proxgrad_diag_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
              ::testing::UnitTest::GetInstance()->current_test_info()->name());
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Envelope, DetectsRiseOfWindowMaximum) {
  EXPECT_FALSE(check_envelope(make_trace({5.0, 6.0, 4.0, 3.0}), 1));
  EXPECT_TRUE(check_envelope(make_trace({5.0, 4.0, 4.5, 3.0}), 1));
  EXPECT_FALSE(check_envelope(make_trace({5.0, 4.0, 4.5, 3.0}), 0));
  EXPECT_EQ(window_maxima(make_trace({5.0, 4.0, 4.5, 3.0, 2.0}), 1), (std::vector<double>{5.0, 5.0, 4.5, 4.5, 3.0}));
}

TEST(Checkers, SingleRowTracePassesStructuralChecks) {
  const Trace t = make_trace({2.0});
  EXPECT_TRUE(check_acceptance(t, 5, 1e-4).empty());
  EXPECT_TRUE(check_envelope(t, 5));
  EXPECT_TRUE(check_level_set(t));
  EXPECT_TRUE(check_records(t, 2.0).empty());
  EXPECT_FALSE(check_vanishing_steps(t, 1e-6));
}

TEST(Acceptance, FlagsTheOffendingRow) {
  // Row 1 -> 2 would need psi[2] <= 4 - 0.5 * 0.5 * 1 * 1 = 3.75.
  Trace t = make_trace({5.0, 4.0, 3.8, 3.0}, 1.0, 1.0);
  const auto v = check_acceptance(t, 0, 0.5);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].row, 1u);
  EXPECT_NEAR(v[0].excess, 0.05, 1e-12);
  // With two rows in the window the reference for row 1 is 5.
  EXPECT_TRUE(check_acceptance(t, 1, 0.5).empty());
}

TEST(Acceptance, MalformedTracesAreRejected) {
  Trace gap = make_trace({3.0, 2.0, 1.0});
  gap.records[1].step_norm.reset();
  EXPECT_THROW(check_acceptance(gap, 0, 0.5), TraceFormatError);
  Trace bad_index = make_trace({3.0, 2.0});
  bad_index.records[1].k = 5;
  EXPECT_THROW(check_acceptance(bad_index, 0, 0.5), TraceFormatError);
  EXPECT_THROW(check_acceptance(Trace{}, 0, 0.5), TraceFormatError);
}

TEST(LevelSet, DetectsEscape) {
  EXPECT_TRUE(check_level_set(make_trace({2.0, 1.0, 2.0})));
  EXPECT_FALSE(check_level_set(make_trace({2.0, 1.0, 2.5})));
}

TEST(TailChecks, UseTheFinalTenthOfSteps) {
  // 20 steps: the tail is the last 2.
  std::vector<double> psi(21, 0.0);
  Trace t = make_trace(psi, 4.0, 1.0);
  EXPECT_FALSE(check_vanishing_steps(t, 1e-6));
  t.records[19].step_norm = 1e-7;
  EXPECT_TRUE(check_vanishing_steps(t, 1e-6));
  EXPECT_FALSE(check_gamma_step_product(t, 1e-7));
  EXPECT_TRUE(check_gamma_step_product(t, 1e-6));
  // A small step outside the tail does not count.
  t.records[19].step_norm = 1.0;
  t.records[10].step_norm = 0.0;
  EXPECT_FALSE(check_vanishing_steps(t, 1e-6));
}

TEST(GammaBound, ReportsMaximumAndTrend) {
  Trace t = make_trace(std::vector<double>(9, 0.0), 1.0, 0.0);
  auto rep = gamma_bound_report(t, 2.0, 10.0);
  EXPECT_EQ(rep.max_gamma, 1.0);
  EXPECT_FALSE(rep.growth_trend);
  // Last quarter (2 of 8 gammas) above tau * gamma_max = 20.
  t.records[6].gamma = 25.0;
  t.records[7].gamma = 30.0;
  rep = gamma_bound_report(t, 2.0, 10.0);
  EXPECT_EQ(rep.max_gamma, 30.0);
  EXPECT_TRUE(rep.growth_trend);
  t.records[6].gamma = 5.0;
  EXPECT_FALSE(gamma_bound_report(t, 2.0, 10.0).growth_trend);
}

TEST(Records, DetectsInconsistentColumns) {
  Trace t = make_trace({3.0, 2.0, 1.0});
  EXPECT_TRUE(check_records(t, 2.0).empty());
  t.records[1].phi = 0.5;
  t.records[0].inner_iters = 2;  // gamma0 * 4 != gamma
  const auto v = check_records(t, 2.0);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].row, 0u);
  EXPECT_EQ(v[1].row, 1u);
}

TEST(Checkers, RealRunPassesAndInjectedFaultsAreCaught) {
  const Trace good = lasso_trace();
  const auto settings = settings_from(good);
  for (const auto& c : run_all_checks(good, settings)) EXPECT_TRUE(c.passed || c.informational) << c.name;

  Trace raised = good;
  raised.records[5].psi += 1.0;
  raised.records[5].f += 1.0;
  EXPECT_FALSE(check_acceptance(raised).empty());
  EXPECT_FALSE(check_envelope(raised, 0));
  EXPECT_FALSE(check_level_set([&] {
    Trace t = good;
    t.records[3].psi = t.records[0].psi + 1.0;
    return t;
  }()));

  Trace stalled = good;
  for (auto& r : stalled.records) {
    if (r.step_norm) r.step_norm = 1.0;
  }
  EXPECT_FALSE(check_vanishing_steps(stalled, 1e-6));
  EXPECT_FALSE(check_gamma_step_product(stalled, 1e-5));

  Trace edited = good;
  edited.records[2].psi += 1e-3;
  bool records_failed = false;
  for (const auto& c : run_all_checks(edited, settings)) {
    if (c.name == "records") records_failed = !c.passed;
  }
  EXPECT_TRUE(records_failed);
}

TEST(TraceCsv, HeaderAndEmptyFields) {
  const std::string s = to_csv(make_trace({1.0, 0.5}));
  std::istringstream is(s);
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, std::string(kTraceHeader));
  std::getline(is, line);
  EXPECT_EQ(line.substr(line.size() - 2), ",1") << line;
  std::getline(is, line);
  EXPECT_EQ(line.substr(line.find(",,")), ",,,,,1,");
}

TEST(TraceCsv, RoundTripIsExactOnRandomTraces) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_int_distribution<int> len(1, 40);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    Trace t;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) {
      IterateRecord r;
      r.k = static_cast<std::size_t>(k);
      r.f = u(rng) * std::pow(10.0, u(rng) / 100.0);
      r.phi = u(rng);
      r.psi = r.f + r.phi;
      if (coin(rng)) r.gamma0 = std::abs(u(rng)) + 1e-300;
      if (coin(rng)) r.gamma = std::abs(u(rng));
      if (coin(rng)) r.inner_iters = static_cast<std::size_t>(std::abs(u(rng)));
      if (coin(rng)) r.step_norm = std::abs(u(rng)) * 1e-200;
      if (coin(rng)) r.residual = std::abs(u(rng));
      if (coin(rng)) r.accepted_ref = u(rng);
      t.records.push_back(r);
    }
    EXPECT_EQ(from_csv(to_csv(t)), t.records);
  }
}

TEST(TraceCsv, MalformedInputs) {
  EXPECT_THROW(from_csv(""), TraceFormatError);
  EXPECT_THROW(from_csv("k,f,phi\n0,1,2\n"), TraceFormatError);
  const std::string header = std::string(kTraceHeader) + "\n";
  EXPECT_THROW(from_csv(header + "0,1,0,1,,,,,\n"), TraceFormatError);
  EXPECT_THROW(from_csv(header + "0,abc,0,1,,,,,,\n"), TraceFormatError);
  EXPECT_THROW(from_csv(header + "1,1,0,1,,,,,,\n"), TraceFormatError);
  EXPECT_EQ(from_csv(header + "0,1,0,1,,,,,,\n").size(), 1u);
}

TEST(TraceFile, SidecarCarriesMetadata) {
  const auto dir = temp_dir();
  const Trace t = lasso_trace();
  const auto path = dir / "lasso.trace.csv";
  write_trace(path, t);
  bool has_meta = false;
  EXPECT_EQ(read_trace(path, &has_meta), t);
  EXPECT_TRUE(has_meta);
  EXPECT_EQ(t.x0_hash, point_hash(Vector{0.0, 0.0}));
  EXPECT_NE(point_hash(Vector{0.0, 0.0}), point_hash(Vector{-0.0, 0.0}));

  std::filesystem::remove(sidecar_path(path));
  const Trace bare = read_trace(path, &has_meta);
  EXPECT_FALSE(has_meta);
  EXPECT_EQ(bare.records, t.records);
  std::filesystem::remove_all(dir);
}

TEST(SolverConfigJson, RoundTripAndUnknownFields) {
  SolverConfig c;
  c.m = 3;
  c.gamma0 = Gamma0Strategy::constant(0.25);
  c.tau_abs = 1e-9;
  EXPECT_EQ(solver_config_from_json(to_json(c)), c);
  EXPECT_THROW(solver_config_from_json(nlohmann::json{{"window", 3}}), ConfigError);
}
