#include "sbpnls/experiments.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "json.hpp"
#include "sbpnls/errors.hpp"
#include "sbpnls/kernels.hpp"
#include "sbpnls/tableau.hpp"

namespace sbpnls {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::ostream& precise(std::ostream& os) { return os << std::setprecision(17); }

// Runs fn(i) for i in [0, count) on up to `jobs` threads; the first exception
// is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Least-squares slope of log y against log x over positive finite samples.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return kNaN;
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : kNaN;
}

IntegrateOptions base_options(const Setup& s) {
  const RunConfig& c = s.config;
  IntegrateOptions o;
  o.t_end = c.t_end;
  o.dt = c.dt;
  o.mass = s.invariants.mu;
  o.energy = s.invariants.eta;
  if (c.record_naive_energy && s.naive_energy) o.naive_energy = s.naive_energy;
  o.record_every = c.record_every;
  o.snapshot_times = c.snapshot_times;
  return o;
}

double max_drift(const RunRecord& r, double StepRow::*field) {
  double m = 0.0;
  if (r.rows.empty()) return m;
  for (const auto& row : r.rows) m = std::max(m, std::abs(row.*field - r.rows.front().*field));
  return m;
}

}  // namespace

double Setup::error(std::span<const double> state, double t) const {
  if (!problem.has_exact()) throw SetupFailure("problem '" + problem.name + "' has no exact solution");
  const std::size_t n = ops->size();
  return l2_error(*ops, state.first(2 * n), problem.exact_solution(ops->grid, t));
}

double Setup::density_error(std::span<const double> state, double t) const {
  if (!problem.has_exact()) throw SetupFailure("problem '" + problem.name + "' has no exact solution");
  const std::size_t n = ops->size();
  return density_l2_error(*ops, state.first(2 * n), problem.exact_solution(ops->grid, t));
}

std::unique_ptr<Setup> make_setup(const RunConfig& config) {
  config.validate();
  auto s = std::make_unique<Setup>();
  s->config = config;
  s->problem = problem_by_name(config.problem);
  if (config.x_left && config.problem == "gray_soliton")
    throw ConfigError("gray_soliton fixes its own periodic domain; drop domain.*");
  const double xl = config.x_left.value_or(s->problem.x_left);
  const double xr = config.x_right.value_or(s->problem.x_right);
  const double beta = config.beta_override.value_or(s->problem.beta);

  OperatorSet ops;
  try {
    ops = make_operator_set(config.operator_kind, config.operator_order, config.n, xl, xr);
  } catch (const InvalidArgument& e) {
    throw SetupFailure(std::string("operator: ") + e.what());
  }
  const ImexTableau& tab = tableau_by_name(config.tableau);

  if (config.equation == Equation::nls) {
    NlsParams p = make_nls_params(beta, std::move(ops));
    s->ops = p.ops;
    s->state0 = s->problem.initial_state(p.ops->grid);
    s->invariants = {[p](std::span<const double> u) { return energy(p, u); },
                     [p](std::span<const double> u) { return mass(p, u); },
                     [p](std::span<const double> u, double target) {
                       return project_mass_sphere(p, u, target);
                     }};
    s->naive_energy = [p](std::span<const double> u) { return naive_energy(p, u); };
    s->stepper = std::make_shared<Stepper>(make_nls_ode(p), tab);
    s->nls = std::move(p);
  } else {
    HypParams p;
    try {
      p = make_hyp_params(beta, *config.tau, std::move(ops));
    } catch (const InvalidArgument& e) {
      throw SetupFailure(e.what());
    }
    s->ops = p.ops;
    const Vector q0 = s->problem.initial_state(p.ops->grid);
    const std::size_t n = p.n();
    s->state0 = well_prepared_init(p, std::span(q0).first(n), std::span(q0).subspan(n, n));
    s->invariants = {[p](std::span<const double> u) { return hyp_energy(p, u); },
                     [p](std::span<const double> u) { return hyp_mass(p, u); },
                     [p](std::span<const double> u, double target) {
                       return project_mass_ellipsoid(p, u, target);
                     }};
    s->stepper = std::make_shared<Stepper>(make_hyp_ode(p), tab);
    s->hyp = std::move(p);
  }
  return s;
}

RunOutcome execute_run(const Setup& s, bool land_on_t_end) {
  RunOutcome out;
  auto stats = std::make_shared<RelaxationStats>();
  const RelaxationTargets targets{s.invariants.mu(s.state0), s.invariants.eta(s.state0)};
  StepFn step = make_relaxed_step(s.stepper, s.invariants, targets, s.config.relaxation, stats);
  IntegrateOptions o = base_options(s);
  if (land_on_t_end && s.config.relaxation.mode != RelaxationMode::none) {
    o.land_on_t_end = true;
    o.landing_step = make_baseline_step(s.stepper);
  }
  const std::size_t rhs0 = s.stepper->rhs_evaluations();
  const std::size_t solves0 = s.stepper->implicit_solves();
  const auto start = std::chrono::steady_clock::now();
  out.result = integrate(step, s.state0, o);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.relaxation = *stats;
  out.rhs_evaluations = s.stepper->rhs_evaluations() - rhs0;
  out.implicit_solves = s.stepper->implicit_solves() - solves0;
  if (out.result.record.completed && s.problem.has_exact())
    out.final_error = s.error(out.result.state, out.result.t);
  return out;
}

RunOutcome execute_run(const RunConfig& config, bool land_on_t_end) {
  return execute_run(*make_setup(config), land_on_t_end);
}

void write_invariants_csv(std::ostream& os, const RunRecord& record, bool with_naive) {
  precise(os) << "step,t,gamma,mass,energy" << (with_naive ? ",naive_energy" : "") << '\n';
  for (const auto& r : record.rows) {
    os << r.step << ',' << r.t << ',' << r.gamma << ',' << r.mass << ',' << r.energy;
    if (with_naive) os << ',' << r.naive_energy.value_or(kNaN);
    os << '\n';
  }
}

void write_snapshots_csv(std::ostream& os, const Setup& s, const RunRecord& record) {
  const bool hyp = s.components() == 4;
  precise(os) << "t,x,v,w" << (hyp ? ",nu,omega" : "") << '\n';
  const std::size_t n = s.ops->size();
  for (const auto& snap : record.snapshots)
    for (std::size_t i = 0; i < n; ++i) {
      os << snap.t << ',' << s.ops->grid.nodes[i];
      for (std::size_t c = 0; c < s.components(); ++c) os << ',' << snap.state[c * n + i];
      os << '\n';
    }
}

std::string metadata_json(const Setup& s, const RunOutcome& o) {
  using nlohmann::json;
  const RunConfig& c = s.config;
  json cfg = {{"label", c.label},
              {"problem", c.problem},
              {"equation", to_string(c.equation)},
              {"operator", {{"kind", to_string(c.operator_kind)}, {"order", c.operator_order}, {"n", c.n}}},
              {"domain", {s.ops->grid.x_left, s.ops->grid.x_right}},
              {"tableau", c.tableau},
              {"dt", c.dt},
              {"t_end", c.t_end},
              {"relaxation",
               {{"mode", to_string(c.relaxation.mode)},
                {"gamma_tol", c.relaxation.gamma_tol},
                {"gamma_bracket", c.relaxation.gamma_bracket},
                {"max_expansions", c.relaxation.max_expansions},
                {"max_iterations", c.relaxation.max_iterations}}},
              {"snapshot_times", c.snapshot_times},
              {"record_every", c.record_every}};
  if (c.tau) cfg["tau"] = *c.tau;
  if (c.beta_override) cfg["beta_override"] = *c.beta_override;
  const RunRecord& r = o.result.record;
  json j = {{"config", cfg},
            {"operator_description", s.ops->describe()},
            {"completed", r.completed},
            {"final_time", o.result.t},
            {"steps", r.steps},
            {"step_retries", r.step_retries},
            {"wall_seconds", o.wall_seconds},
            {"threads", kernels::num_threads()},
            {"rhs_evaluations", o.rhs_evaluations},
            {"implicit_solves", o.implicit_solves},
            {"relaxation_steps", o.relaxation.steps},
            {"relaxation_residual_evaluations", o.relaxation.residual_evaluations},
            {"max_abs_gamma_minus_one", o.relaxation.max_abs_gamma_minus_one},
            {"max_abs_mass_change", max_drift(r, &StepRow::mass)},
            {"max_abs_energy_change", max_drift(r, &StepRow::energy)}};
  if (!r.completed) j["failure"] = r.failure;
  if (o.final_error) j["final_error"] = *o.final_error;
  return j.dump(2);
}

std::filesystem::path resolve_output_dir(const RunConfig& config,
                                         const std::optional<std::string>& explicit_dir) {
  if (explicit_dir && !explicit_dir->empty()) return *explicit_dir;
  if (!config.output.empty()) return config.output;
  if (const char* env = std::getenv("SBPNLS_OUTPUT_DIR"); env && *env) return env;
  return "out";
}

ConvergenceTable run_convergence(const RunConfig& config, std::size_t jobs) {
  if (config.sweep_values.size() < 3)
    throw InvalidArgument("convergence sweep needs at least 3 values");
  ConvergenceTable table;
  table.axis = config.sweep_axis;
  const ProblemSpec spec = problem_by_name(config.problem);
  if (!spec.has_exact() && config.sweep_axis != SweepAxis::time)
    throw InvalidArgument("problem '" + config.problem +
                          "' has no exact solution; only time sweeps can use a reference");
  if (config.sweep_axis == SweepAxis::tau && config.equation != Equation::nls_hyperbolic)
    throw InvalidArgument("tau sweeps need equation = nls_hyperbolic");

  Vector reference;
  if (!spec.has_exact()) {
    RunConfig ref = config;
    ref.relaxation.mode = RelaxationMode::none;
    ref.tableau = "kc54";
    ref.dt = config.reference_dt.value_or(
        *std::min_element(config.sweep_values.begin(), config.sweep_values.end()) / 10.0);
    ref.snapshot_times.clear();
    auto r = execute_run(ref);
    r.result.require_completed();
    reference = std::move(r.result.state);
  }

  const std::size_t count = config.sweep_values.size();
  table.rows.resize(count);
  parallel_for(count, jobs, [&](std::size_t i) {
    RunConfig c = config;
    c.snapshot_times.clear();
    const double value = config.sweep_values[i];
    switch (config.sweep_axis) {
      case SweepAxis::space: c.n = static_cast<std::size_t>(std::llround(value)); break;
      case SweepAxis::time: c.dt = value; break;
      case SweepAxis::tau: c.tau = value; break;
    }
    auto setup = make_setup(c);
    // Reference comparisons need the final state exactly at t_end.
    RunOutcome o = execute_run(*setup, !spec.has_exact());
    ConvergenceRow& row = table.rows[i];
    row.resolution = value;
    row.completed = o.result.record.completed;
    row.max_abs_gamma_minus_one = o.relaxation.max_abs_gamma_minus_one;
    if (!row.completed)
      row.error = kNaN;
    else if (spec.has_exact())
      row.error = *o.final_error;
    else
      row.error = l2_error(*setup->ops, std::span<const double>(o.result.state).first(2 * setup->ops->size()),
                           std::span<const double>(reference).first(2 * setup->ops->size()));
  });

  std::vector<double> res, err, gam;
  for (std::size_t i = 0; i < count; ++i) {
    ConvergenceRow& row = table.rows[i];
    row.order = kNaN;
    if (i > 0) {
      const ConvergenceRow& prev = table.rows[i - 1];
      double ratio = config.sweep_axis == SweepAxis::space ? row.resolution / prev.resolution
                                                           : prev.resolution / row.resolution;
      if (ratio != 1.0 && row.error > 0.0 && prev.error > 0.0)
        row.order = std::log(prev.error / row.error) / std::log(ratio);
    }
    res.push_back(row.resolution);
    err.push_back(row.error);
    gam.push_back(row.max_abs_gamma_minus_one);
  }
  const double sign = config.sweep_axis == SweepAxis::space ? -1.0 : 1.0;
  table.fitted_order = sign * loglog_slope(res, err);
  table.fitted_gamma_order = config.relaxation.mode == RelaxationMode::none
                                 ? kNaN
                                 : sign * loglog_slope(res, gam);
  return table;
}

void write_convergence_csv(std::ostream& os, const ConvergenceTable& table) {
  precise(os) << "resolution,error,order\n";
  for (const auto& r : table.rows) os << r.resolution << ',' << r.error << ',' << r.order << '\n';
}

GrowthReport run_error_growth(const RunConfig& config, std::size_t jobs) {
  const ProblemSpec spec = problem_by_name(config.problem);
  if (!spec.has_exact())
    throw InvalidArgument("error growth needs an exact solution for '" + config.problem + "'");
  RunConfig base = config;
  if (base.sample_times.empty())
    for (int k = 1; k <= 20; ++k) base.sample_times.push_back(base.t_end * k / 20.0);
  base.snapshot_times = base.sample_times;
  RunConfig relaxed = base;
  base.relaxation.mode = RelaxationMode::none;
  if (relaxed.relaxation.mode == RelaxationMode::none)
    relaxed.relaxation.mode = RelaxationMode::quadratic_preserving;

  GrowthReport report;
  parallel_for(2, jobs, [&](std::size_t which) {
    const RunConfig& c = which == 0 ? base : relaxed;
    GrowthSeries& g = which == 0 ? report.baseline : report.relaxed;
    auto setup = make_setup(c);
    RunOutcome o = execute_run(*setup);
    g.completed = o.result.record.completed;
    for (const auto& snap : o.result.record.snapshots) {
      g.t.push_back(snap.t);
      g.error.push_back(setup->error(snap.state, snap.t));
      g.density_error.push_back(setup->density_error(snap.state, snap.t));
    }
    try {
      g.slope = growth_fit(g.t, g.error, c.growth_t_floor);
      g.density_slope = growth_fit(g.t, g.density_error, c.growth_t_floor);
    } catch (const FitFailure& e) {
      g.slope = g.density_slope = kNaN;
      g.fit_message = e.what();
    }
  });
  return report;
}

void write_growth_csv(std::ostream& os, const GrowthReport& r) {
  precise(os) << "t_baseline,error_baseline,density_error_baseline,t_relaxed,error_relaxed,"
                 "density_error_relaxed\n";
  const std::size_t rows = std::max(r.baseline.t.size(), r.relaxed.t.size());
  auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : kNaN; };
  for (std::size_t i = 0; i < rows; ++i)
    os << at(r.baseline.t, i) << ',' << at(r.baseline.error, i) << ','
       << at(r.baseline.density_error, i) << ',' << at(r.relaxed.t, i) << ','
       << at(r.relaxed.error, i) << ',' << at(r.relaxed.density_error, i) << '\n';
}

std::vector<BenchRow> run_bench(const std::vector<RunConfig>& configs) {
  if (configs.empty()) throw InvalidArgument("bench needs at least one config");
  std::vector<BenchRow> rows;
  for (const RunConfig& c : configs) {
    auto setup = make_setup(c);
    BenchRow row;
    row.label = c.label.empty() ? c.problem : c.label;
    row.n = c.n;
    row.dt = c.dt;
    row.min_seconds = std::numeric_limits<double>::infinity();
    Vector first;
    for (int rep = 0; rep < c.bench_repeats; ++rep) {
      RunOutcome o = execute_run(*setup);
      o.result.require_completed();
      row.min_seconds = std::min(row.min_seconds, o.wall_seconds);
      row.final_error = o.final_error.value_or(kNaN);
      if (rep == 0)
        first = o.result.state;
      else if (std::memcmp(first.data(), o.result.state.data(), first.size() * sizeof(double)) != 0)
        row.deterministic = false;
    }
    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    row.peak_rss_kb = usage.ru_maxrss;
    rows.push_back(row);
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  precise(os) << "label,n,dt,runtime,error,peak_rss_kb,deterministic\n";
  for (const auto& r : rows)
    os << r.label << ',' << r.n << ',' << r.dt << ',' << r.min_seconds << ',' << r.final_error << ','
       << r.peak_rss_kb << ',' << (r.deterministic ? 1 : 0) << '\n';
}

std::vector<ConformanceRow> run_conformance(unsigned seed, std::size_t random_sizes, double tol) {
  struct Case {
    OperatorKind kind;
    int order;
    std::size_t n;
    double xl, xr;
  };
  std::vector<Case> cases;
  for (std::size_t n : {16, 17, 64, 65}) cases.push_back({OperatorKind::fourier, 0, n, -1.0, 1.0});
  for (int p : {2, 4, 6, 8})
    for (std::size_t n : {32, 41}) cases.push_back({OperatorKind::central_fd, p, n, -1.0, 1.0});
  for (int p : {2, 4, 6})
    for (std::size_t n : {3, 18, 40, 53}) {
      if (p > 2 && n < 18) continue;
      cases.push_back({OperatorKind::bounded_fd_sbp, p, n, 0.0, 1.0});
    }
  for (int p : {2, 4, 6})
    for (std::size_t n : {32, 41}) cases.push_back({OperatorKind::upwind_fd, p, n, -1.0, 1.0});

  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> size(24, 96);
  std::uniform_real_distribution<double> left(-5.0, 0.0), length(0.5, 10.0);
  for (std::size_t k = 0; k < random_sizes; ++k) {
    const double xl = left(rng);
    const double xr = xl + length(rng);
    const std::size_t n = size(rng);
    cases.push_back({OperatorKind::fourier, 0, n, xl, xr});
    for (int p : {2, 4, 6, 8}) cases.push_back({OperatorKind::central_fd, p, n, xl, xr});
    for (int p : {2, 4, 6}) cases.push_back({OperatorKind::bounded_fd_sbp, p, n, xl, xr});
    for (int p : {2, 4, 6}) cases.push_back({OperatorKind::upwind_fd, p, n, xl, xr});
  }

  std::vector<ConformanceRow> rows;
  for (const Case& c : cases) {
    OperatorSet ops = make_operator_set(c.kind, c.order, c.n, c.xl, c.xr);
    ConformanceRow row;
    row.description = ops.describe();
    row.report = sbp_conformance(ops);
    row.passed = row.report.passes(tol);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_conformance_csv(std::ostream& os, const std::vector<ConformanceRow>& rows) {
  precise(os) << "operator,sbp1,sbp2,dtilde,a2_symmetry,a2_min_eigenvalue,consistency,"
                 "upwind,upwind_symmetry,upwind_max_eigenvalue,passed\n";
  auto opt = [](const std::optional<double>& v) { return v.value_or(kNaN); };
  for (const auto& r : rows) {
    const auto& c = r.report;
    os << '"' << r.description << "\"," << c.sbp1_residual << ',' << c.sbp2_residual << ','
       << c.dtilde_residual << ',' << c.a2_symmetry << ',' << c.a2_min_eigenvalue << ','
       << c.consistency << ',' << opt(c.upwind_residual) << ',' << opt(c.upwind_symmetry) << ','
       << opt(c.upwind_max_eigenvalue) << ',' << (r.passed ? 1 : 0) << '\n';
  }
}

namespace {

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw SetupFailure("cannot write " + (dir / name).string());
  return f;
}

}  // namespace

int cmd_run(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
  auto setup = make_setup(config);
  RunOutcome o = execute_run(*setup);
  const RunRecord& r = o.result.record;
  {
    auto f = open_output(out, "invariants.csv");
    write_invariants_csv(f, r, config.record_naive_energy && setup->nls.has_value());
  }
  if (!config.snapshot_times.empty()) {
    auto f = open_output(out, "snapshots.csv");
    write_snapshots_csv(f, *setup, r);
  }
  {
    auto f = open_output(out, "metadata.json");
    f << metadata_json(*setup, o) << '\n';
  }
  log << std::setprecision(6) << config.label << ": " << r.steps << " steps to t=" << o.result.t
      << " in " << o.wall_seconds << " s, max|dM|=" << max_drift(r, &StepRow::mass)
      << ", max|dE|=" << max_drift(r, &StepRow::energy);
  if (o.final_error) log << ", error=" << *o.final_error;
  log << '\n';
  if (!r.completed) {
    log << "error: " << r.failure << '\n';
    return 2;
  }
  return 0;
}

int cmd_converge(const RunConfig& config, const std::filesystem::path& out, std::size_t jobs,
                 std::ostream& log) {
  ConvergenceTable t = run_convergence(config, jobs);
  auto f = open_output(out, "convergence.csv");
  write_convergence_csv(f, t);
  log << std::setprecision(4);
  for (const auto& r : t.rows)
    log << to_string(t.axis) << ' ' << r.resolution << "  error " << r.error << "  order "
        << r.order << '\n';
  log << "fitted order " << t.fitted_order << '\n';
  bool ok = std::all_of(t.rows.begin(), t.rows.end(), [](const auto& r) { return r.completed; });
  if (!ok) log << "error: some sweep points did not complete\n";
  return ok ? 0 : 2;
}

int cmd_error_growth(const RunConfig& config, const std::filesystem::path& out, std::size_t jobs,
                     std::ostream& log) {
  GrowthReport r = run_error_growth(config, jobs);
  {
    auto f = open_output(out, "error_growth.csv");
    write_growth_csv(f, r);
  }
  nlohmann::json j;
  for (auto [name, g] : {std::pair{"baseline", &r.baseline}, std::pair{"relaxed", &r.relaxed}}) {
    j[name] = {{"slope", g->slope}, {"density_slope", g->density_slope}, {"completed", g->completed}};
    if (!g->fit_message.empty()) j[name]["fit_failure"] = g->fit_message;
    log << std::setprecision(4) << name << ": error slope " << g->slope << ", density slope "
        << g->density_slope << (g->fit_message.empty() ? "" : " (" + g->fit_message + ")") << '\n';
  }
  auto f = open_output(out, "growth_fit.json");
  f << j.dump(2) << '\n';
  return r.baseline.completed && r.relaxed.completed ? 0 : 2;
}

int cmd_bench(const std::vector<RunConfig>& configs, const std::filesystem::path& out,
              std::ostream& log) {
  auto rows = run_bench(configs);
  auto f = open_output(out, "bench.csv");
  write_bench_csv(f, rows);
  for (const auto& r : rows)
    log << std::setprecision(4) << r.label << ": best " << r.min_seconds << " s, error "
        << r.final_error << ", peak rss " << r.peak_rss_kb << " kB"
        << (r.deterministic ? "" : " (repeats differ)") << '\n';
  return 0;
}

int cmd_conformance(unsigned seed, const std::filesystem::path& out, std::ostream& log) {
  auto rows = run_conformance(seed);
  auto f = open_output(out, "conformance.csv");
  write_conformance_csv(f, rows);
  std::size_t failed = 0;
  for (const auto& r : rows)
    if (!r.passed) {
      ++failed;
      log << "FAIL " << r.description << '\n';
    }
  log << rows.size() - failed << "/" << rows.size() << " operator sets pass\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace sbpnls
