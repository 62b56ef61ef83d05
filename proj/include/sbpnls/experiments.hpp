#pragma once
// Declarative experiment driver behind the command-line tool.
//
// Config files are flat `key = value` lines with dotted keys, `#` comments
// and comma-separated lists. Unknown keys are errors. Recognised keys:
//
//   problem, equation (nls | nls_hyperbolic), operator.kind, operator.order,
//   operator.n, domain.x_left, domain.x_right, tableau, dt, t_end, tau,
//   beta_override, relaxation.mode, relaxation.gamma_tol,
//   relaxation.gamma_bracket, relaxation.max_expansions,
//   relaxation.max_iterations, output, snapshot_times, record_every,
//   record_naive_energy, sweep.axis (space | time | tau), sweep.values,
//   reference.dt, growth.sample_times, growth.t_floor, bench.repeats, label
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sbpnls/hyperbolic.hpp"
#include "sbpnls/integrators.hpp"
#include "sbpnls/nls.hpp"
#include "sbpnls/problems.hpp"
#include "sbpnls/relaxation.hpp"

namespace sbpnls {

enum class Equation { nls, nls_hyperbolic };
std::string to_string(Equation e);

enum class SweepAxis { space, time, tau };
std::string to_string(SweepAxis a);

struct RunConfig {
  std::string label;
  std::string problem = "two_soliton";
  Equation equation = Equation::nls;
  OperatorKind operator_kind = OperatorKind::fourier;
  int operator_order = 0;
  std::size_t n = 1024;
  std::optional<double> x_left, x_right;  // default: the problem's domain
  std::string tableau = "kc54";
  double dt = 1e-2;
  double t_end = 1.0;
  RelaxationConfig relaxation;
  std::optional<double> tau;
  std::optional<double> beta_override;
  std::string output;
  std::vector<double> snapshot_times;
  std::size_t record_every = 1;
  bool record_naive_energy = false;

  SweepAxis sweep_axis = SweepAxis::time;
  std::vector<double> sweep_values;
  std::optional<double> reference_dt;
  std::vector<double> sample_times;
  double growth_t_floor = 1.0;
  int bench_repeats = 3;

  // Checks registry names and value ranges; throws ConfigError.
  void validate() const;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

// Everything needed to integrate one configuration. Immutable once built, but
// the stepper holds per-instance scratch, so each worker builds its own.
struct Setup {
  RunConfig config;
  ProblemSpec problem;
  std::shared_ptr<const OperatorSet> ops;
  std::optional<NlsParams> nls;
  std::optional<HypParams> hyp;
  Vector state0;
  InvariantPair invariants;
  Functional naive_energy;  // NLS only
  std::shared_ptr<Stepper> stepper;

  std::size_t components() const { return hyp ? 4 : 2; }
  // L2 errors of the q0 = v + i w part against the exact solution at t.
  double error(std::span<const double> state, double t) const;
  double density_error(std::span<const double> state, double t) const;
};

std::unique_ptr<Setup> make_setup(const RunConfig& config);

struct RunOutcome {
  IntegrateResult result;
  RelaxationStats relaxation;
  std::size_t rhs_evaluations = 0;
  std::size_t implicit_solves = 0;
  double wall_seconds = 0.0;
  std::optional<double> final_error;
};

// One integration with the configured relaxation. Failures are reported in
// result.record rather than thrown. With `land_on_t_end` a relaxed run ends
// with one unrelaxed step onto t_end, which costs exact conservation.
RunOutcome execute_run(const Setup& setup, bool land_on_t_end = false);
RunOutcome execute_run(const RunConfig& config, bool land_on_t_end = false);

// File writers. All floating-point values use 17 significant digits.
void write_invariants_csv(std::ostream& os, const RunRecord& record, bool with_naive);
void write_snapshots_csv(std::ostream& os, const Setup& setup, const RunRecord& record);
std::string metadata_json(const Setup& setup, const RunOutcome& outcome);

// Output directory: explicit > config.output > $SBPNLS_OUTPUT_DIR > "out".
std::filesystem::path resolve_output_dir(const RunConfig& config,
                                         const std::optional<std::string>& explicit_dir);

struct ConvergenceRow {
  double resolution = 0.0;  // n, dt or tau
  double error = 0.0;
  double order = 0.0;  // from the previous row; NaN on the first row
  double max_abs_gamma_minus_one = 0.0;
  bool completed = true;
};

struct ConvergenceTable {
  SweepAxis axis = SweepAxis::time;
  std::vector<ConvergenceRow> rows;
  // Least-squares slope of log error against log resolution, sign chosen so
  // that convergence gives a positive number. NaN if undefined.
  double fitted_order = 0.0;
  double fitted_gamma_order = 0.0;
};

ConvergenceTable run_convergence(const RunConfig& config, std::size_t jobs = 1);
void write_convergence_csv(std::ostream& os, const ConvergenceTable& table);

struct GrowthSeries {
  std::vector<double> t;
  std::vector<double> error;
  std::vector<double> density_error;
  double slope = 0.0;          // NaN when the fit fails
  double density_slope = 0.0;  // NaN when the fit fails
  std::string fit_message;
  bool completed = true;
};

struct GrowthReport {
  GrowthSeries baseline;
  GrowthSeries relaxed;
};

// Runs the configuration with relaxation off and on (config.relaxation.mode,
// or quadratic-preserving if that is none).
GrowthReport run_error_growth(const RunConfig& config, std::size_t jobs = 1);
void write_growth_csv(std::ostream& os, const GrowthReport& report);

struct BenchRow {
  std::string label;
  std::size_t n = 0;
  double dt = 0.0;
  double min_seconds = 0.0;
  double final_error = 0.0;
  long peak_rss_kb = 0;
  bool deterministic = true;  // identical errors across repeats
};

std::vector<BenchRow> run_bench(const std::vector<RunConfig>& configs);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

struct ConformanceRow {
  std::string description;
  ConformanceReport report;
  bool passed = false;
};

// Every operator kind and order on fixed sizes plus `random_sizes` sizes
// drawn with `seed`.
std::vector<ConformanceRow> run_conformance(unsigned seed, std::size_t random_sizes = 4,
                                            double tol = 1e-12);
void write_conformance_csv(std::ostream& os, const std::vector<ConformanceRow>& rows);

// Command entry points used by the CLI. They write their files into `out`
// and return a process exit code.
int cmd_run(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
int cmd_converge(const RunConfig& config, const std::filesystem::path& out, std::size_t jobs,
                 std::ostream& log);
int cmd_error_growth(const RunConfig& config, const std::filesystem::path& out,
                     std::size_t jobs, std::ostream& log);
int cmd_bench(const std::vector<RunConfig>& configs, const std::filesystem::path& out,
              std::ostream& log);
int cmd_conformance(unsigned seed, const std::filesystem::path& out, std::ostream& log);

}  // namespace sbpnls
