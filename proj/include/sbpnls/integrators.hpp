#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbpnls/ode.hpp"
#include "sbpnls/tableau.hpp"

namespace sbpnls {

// One-step method with preallocated stage storage. Explicit tableaus are
// stepped on the full right-hand side; additive ones treat linear_rhs with
// the implicit part and nonlinear_rhs with the explicit part. A stepper is
// owned by a single integration run.
class Stepper {
 public:
  Stepper(SplitOde ode, const ImexTableau& tableau);

  // out = one step of size dt from u. Negative dt is allowed (every stage
  // matrix of the problems here is nonsingular for real coefficients).
  void step(std::span<const double> u, double dt, std::span<double> out);

  const SplitOde& ode() const { return ode_; }
  const ImexTableau& tableau() const { return tableau_; }
  std::size_t rhs_evaluations() const { return rhs_evals_; }
  std::size_t implicit_solves() const { return solves_; }

 private:
  void erk(std::span<const double> u, double dt, std::span<double> out);
  void imex(std::span<const double> u, double dt, std::span<double> out);

  SplitOde ode_;
  ImexTableau tableau_;
  std::vector<Vector> k_explicit_, k_implicit_;
  Vector stage_, rhs_;
  std::vector<double> coeffs_;
  std::vector<const double*> terms_;
  std::size_t rhs_evals_ = 0, solves_ = 0;
};

Vector erk_step(const SplitOde& ode, const ImexTableau& tableau, std::span<const double> u,
                double dt);
Vector imex_step(const SplitOde& ode, const ImexTableau& tableau, std::span<const double> u,
                 double dt);

struct StepOutcome {
  Vector state;
  double dt_taken = 0.0;  // relaxed increment gamma * dt
  double gamma = 1.0;
};

// Advances u by a nominal step dt starting at time t.
using StepFn = std::function<StepOutcome(std::span<const double> u, double t, double dt)>;

using Functional = std::function<double(std::span<const double>)>;

struct StepRow {
  std::size_t step = 0;
  double t = 0.0;
  double gamma = 1.0;
  double mass = 0.0;
  double energy = 0.0;
  std::optional<double> naive_energy;
};

struct Snapshot {
  double t_nominal = 0.0;
  double t = 0.0;
  Vector state;
};

struct RunRecord {
  std::vector<StepRow> rows;
  std::vector<Snapshot> snapshots;
  std::size_t steps = 0;
  std::size_t step_retries = 0;
  bool completed = false;
  std::string failure;
  double wall_seconds = 0.0;
};

struct IntegrateOptions {
  double t0 = 0.0;
  double t_end = 1.0;
  double dt = 1e-2;
  // Monitored functionals; rows are recorded when mass and energy are set.
  Functional mass;
  Functional energy;
  Functional naive_energy;
  std::size_t record_every = 1;
  // The nominal time grid is cut at these times and the state is stored
  // together with the actual (possibly relaxed) time.
  std::vector<double> snapshot_times;
  // Retry a failed step with halved dt up to this many times.
  int max_step_halvings = 3;
  // After the last step, take one unrelaxed step (possibly backwards) so the
  // final state sits exactly at t_end.
  bool land_on_t_end = false;
  StepFn landing_step;
};

struct IntegrateResult {
  Vector state;
  double t = 0.0;
  RunRecord record;

  // Throws the stored failure as NumericFailure when the run did not finish.
  const IntegrateResult& require_completed() const;
};

// Fixed-step driver. The number of steps is set by the nominal time grid
// t0, t0 + dt, ..., t_end (last step shortened); the state time advances by
// the relaxed increments reported by `step`.
IntegrateResult integrate(const StepFn& step, std::span<const double> state0,
                          const IntegrateOptions& options);

// Plain baseline step without relaxation.
StepFn make_baseline_step(std::shared_ptr<Stepper> stepper);

}  // namespace sbpnls
