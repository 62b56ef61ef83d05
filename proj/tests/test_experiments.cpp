#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sbpnls/errors.hpp"
#include "sbpnls/experiments.hpp"

using namespace sbpnls;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("sbpnls_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int error_line(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

const char* kTwoSoliton = R"(
problem = two_soliton   # breather
operator.kind = fourier
operator.n = 256
tableau = ars343
dt = 0.01
t_end = 0.5
)";

}  // namespace

TEST_CASE("config parser reads every field kind") {
  RunConfig c = parse_config_string(R"(
# comment line
label = demo
problem = two_soliton
equation = nls_hyperbolic
tau = 1e-3
operator.kind = upwind_fd
operator.order = 6
operator.n = 128
domain.x_left = -20
domain.x_right = 20
tableau = kc43
dt = 0.005
t_end = 2
relaxation.mode = none
relaxation.gamma_tol = 1e-12
snapshot_times = 0.5, 1 ,2
record_every = 4
sweep.axis = tau
sweep.values = 1e-2,1e-3,1e-4
growth.t_floor = 0.5
)");
  CHECK(c.label == "demo");
  CHECK(c.equation == Equation::nls_hyperbolic);
  CHECK(*c.tau == 1e-3);
  CHECK(c.operator_kind == OperatorKind::upwind_fd);
  CHECK(c.operator_order == 6);
  CHECK(c.n == 128);
  CHECK(*c.x_left == -20.0);
  CHECK(c.relaxation.mode == RelaxationMode::none);
  CHECK(c.relaxation.gamma_tol == 1e-12);
  CHECK(c.snapshot_times == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(c.record_every == 4);
  CHECK(c.sweep_axis == SweepAxis::tau);
  CHECK(c.sweep_values.size() == 3);
  CHECK(c.growth_t_floor == 0.5);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(error_line("problem = two_soliton\nbogus.key = 1\n") == 2);
  CHECK(error_line("\n\ndt = fast\n") == 3);
  CHECK(error_line("problem = four_soliton\n") == 1);
  CHECK(error_line("tableau = rk45\n") == 1);
  CHECK(error_line("dt = 0.1\ndt = 0.2\n") == 2);
  CHECK(error_line("dt = -1\n") == 1);
  CHECK(error_line("just words\n") == 1);
  CHECK(error_line("relaxation.mode = sometimes\n") == 1);
}

TEST_CASE("config cross-field rules") {
  CHECK_THROWS_AS(parse_config_string("equation = nls_hyperbolic\noperator.kind = upwind_fd\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_string("tau = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("equation = nls_hyperbolic\ntau = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("domain.x_left = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("t_end = 1\nsnapshot_times = 2\n"), ConfigError);
}

TEST_CASE("output directory precedence") {
  RunConfig c;
  setenv("SBPNLS_OUTPUT_DIR", "/tmp/from_env", 1);
  CHECK(resolve_output_dir(c, std::nullopt) == fs::path("/tmp/from_env"));
  c.output = "from_config";
  CHECK(resolve_output_dir(c, std::nullopt) == fs::path("from_config"));
  CHECK(resolve_output_dir(c, std::string("explicit")) == fs::path("explicit"));
  unsetenv("SBPNLS_OUTPUT_DIR");
  c.output.clear();
  CHECK(resolve_output_dir(c, std::nullopt) == fs::path("out"));
}

TEST_CASE("cmd_run writes invariants and metadata, snapshots only when asked") {
  RunConfig c = parse_config_string(kTwoSoliton);
  fs::path out = scratch_dir("run");
  std::ostringstream log;
  CHECK(cmd_run(c, out, log) == 0);
  CHECK(fs::exists(out / "invariants.csv"));
  CHECK(fs::exists(out / "metadata.json"));
  CHECK_FALSE(fs::exists(out / "snapshots.csv"));
  std::string csv = slurp(out / "invariants.csv");
  CHECK(csv.rfind("step,t,gamma,mass,energy\n", 0) == 0);
  // 50 steps plus the initial row.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 52);

  c.snapshot_times = {0.25, 0.5};
  fs::path out2 = scratch_dir("run_snap");
  CHECK(cmd_run(c, out2, log) == 0);
  std::string snaps = slurp(out2 / "snapshots.csv");
  CHECK(snaps.rfind("t,x,v,w\n", 0) == 0);
  CHECK(std::count(snaps.begin(), snaps.end(), '\n') == 1 + 2 * 256);
}

TEST_CASE("relaxed runs conserve, baseline runs drift") {
  RunConfig c = parse_config_string(kTwoSoliton);
  c.t_end = 2.0;
  c.relaxation.mode = RelaxationMode::quadratic_preserving;
  RunOutcome on = execute_run(c);
  REQUIRE(on.result.record.completed);
  const auto& rows = on.result.record.rows;
  for (const auto& r : rows) {
    CHECK(std::abs(r.mass - rows.front().mass) <= 1e-11);
    CHECK(std::abs(r.energy - rows.front().energy) <= 1e-11);
  }
  c.relaxation.mode = RelaxationMode::none;
  RunOutcome off = execute_run(c);
  CHECK(std::abs(off.result.record.rows.back().energy - rows.front().energy) >= 1e-6);
}

TEST_CASE("invariants.csv is bit-reproducible") {
  RunConfig c = parse_config_string(kTwoSoliton);
  c.relaxation.mode = RelaxationMode::quadratic_preserving;
  std::ostringstream log;
  fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
  REQUIRE(cmd_run(c, a, log) == 0);
  REQUIRE(cmd_run(c, b, log) == 0);
  CHECK(slurp(a / "invariants.csv") == slurp(b / "invariants.csv"));
}

TEST_CASE("cmd_run reports relaxation failure with a nonzero exit code") {
  RunConfig c = parse_config_string(kTwoSoliton);
  c.dt = 0.2;
  c.relaxation.mode = RelaxationMode::quadratic_preserving;
  c.relaxation.gamma_bracket = 1e-9;
  c.relaxation.max_expansions = 0;
  std::ostringstream log;
  CHECK(cmd_run(c, scratch_dir("fail"), log) != 0);
  CHECK(log.str().find("error:") != std::string::npos);
}

TEST_CASE("hyperbolic setup uses well-prepared data and the ellipsoid projection") {
  RunConfig c = parse_config_string(R"(
problem = two_soliton
equation = nls_hyperbolic
tau = 1e-3
operator.kind = upwind_fd
operator.order = 4
operator.n = 256
tableau = ars343
dt = 0.01
t_end = 0.3
)");
  auto s = make_setup(c);
  CHECK(s->components() == 4);
  CHECK(s->state0.size() == 4 * 256);
  RunOutcome o = execute_run(*s);
  REQUIRE(o.result.record.completed);
  const auto& rows = o.result.record.rows;
  CHECK(std::abs(rows.back().mass - rows.front().mass) <= 1e-11);
  CHECK(std::abs(rows.back().energy - rows.front().energy) <= 1e-10);
  CHECK(o.final_error.has_value());
}

TEST_CASE("convergence sweeps") {
  RunConfig c = parse_config_string(kTwoSoliton);
  c.sweep_values = {0.01, 0.005};
  CHECK_THROWS_AS(run_convergence(c), InvalidArgument);

  c.sweep_values = {0.01, 0.01, 0.01};
  ConvergenceTable same = run_convergence(c);
  CHECK(same.rows[0].error == same.rows[1].error);
  CHECK(same.rows[1].error == same.rows[2].error);
  CHECK(std::isnan(same.rows[1].order));
  CHECK(std::isnan(same.fitted_order));

  c.n = 1024;
  c.sweep_values = {0.01, 0.005, 0.0025};
  c.relaxation.mode = RelaxationMode::none;
  ConvergenceTable serial = run_convergence(c, 1);
  ConvergenceTable parallel = run_convergence(c, 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(serial.rows[i].error == parallel.rows[i].error);
  CHECK(serial.fitted_order > 2.3);
  std::ostringstream csv;
  write_convergence_csv(csv, serial);
  CHECK(csv.str().rfind("resolution,error,order\n0.01,", 0) == 0);
  CHECK(csv.str().find(",nan\n") != std::string::npos);
}

TEST_CASE("time sweeps without a closed form use a reference run") {
  RunConfig c = parse_config_string(R"(
problem = three_soliton
operator.kind = fourier
operator.n = 256
tableau = kc43
t_end = 0.2
relaxation.mode = quadratic_preserving
sweep.values = 0.004, 0.002, 0.001
reference.dt = 0.0001
)");
  ConvergenceTable t = run_convergence(c);
  CHECK(t.fitted_order > 3.0);
  c.sweep_axis = SweepAxis::space;
  c.sweep_values = {128, 256, 512};
  CHECK_THROWS_AS(run_convergence(c), InvalidArgument);
}

TEST_CASE("error growth records both variants and survives a failed fit") {
  RunConfig c = parse_config_string(kTwoSoliton);
  c.t_end = 1.0;
  c.sample_times = {0.2, 0.4, 0.6, 0.8, 1.0};
  c.growth_t_floor = 0.0;
  GrowthReport r = run_error_growth(c, 2);
  CHECK(r.baseline.t.size() == 5);
  CHECK(r.relaxed.t.size() == 5);
  CHECK(std::isfinite(r.baseline.slope));
  // Floor above every sample leaves nothing to fit.
  c.growth_t_floor = 10.0;
  GrowthReport empty = run_error_growth(c);
  CHECK(std::isnan(empty.baseline.slope));
  CHECK_FALSE(empty.baseline.fit_message.empty());
}

TEST_CASE("bench repeats are deterministic") {
  RunConfig c = parse_config_string(kTwoSoliton);
  c.bench_repeats = 3;
  auto rows = run_bench({c});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].deterministic);
  CHECK(rows[0].min_seconds > 0.0);
  CHECK(rows[0].peak_rss_kb > 0);
  CHECK_THROWS_AS(run_bench({}), InvalidArgument);
}

TEST_CASE("conformance battery passes for any seed") {
  for (unsigned seed : {1u, 2u}) {
    auto rows = run_conformance(seed, 2);
    for (const auto& r : rows) CHECK_MESSAGE(r.passed, r.description);
  }
}
