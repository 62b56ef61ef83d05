#pragma once

// Relaxation of Runge-Kutta steps. The quadratic-preserving variant projects
// the provisional step onto the mass manifold and then searches along the
// projected secant
//
//   u(gamma) = pi(u^n + gamma (pi(u~) - u^n))
//
// for the gamma near 1 that restores the energy. Time advances by gamma*dt.

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "sbpnls/integrators.hpp"
#include "sbpnls/nls.hpp"

namespace sbpnls {

enum class RelaxationMode { none, standard, quadratic_preserving };

std::string to_string(RelaxationMode mode);
RelaxationMode relaxation_mode_from_string(const std::string& name);

struct RelaxationConfig {
  RelaxationMode mode = RelaxationMode::quadratic_preserving;
  double gamma_tol = 1e-13;    // relative residual tolerance on eta
  double gamma_bracket = 0.1;  // initial half-width of the search around 1
  int max_expansions = 6;
  int max_iterations = 100;

  void validate() const;
};

using Projection = std::function<Vector(std::span<const double> state, double target)>;

struct InvariantPair {
  Functional eta;          // non-quadratic invariant (energy)
  Functional mu;           // quadratic invariant (mass)
  Projection mu_project;   // onto {mu = target}
};

// Values the relaxed steps restore. Using the initial values keeps roundoff
// from accumulating over a run.
struct RelaxationTargets {
  double mu = 0.0;
  double eta = 0.0;
};

Vector project_mass_sphere(const NlsParams& p, std::span<const double> s, double target_mass);

// Root of `residual` closest to 1. The search widens [1-h, 1] and [1, 1+h]
// geometrically (never reaching gamma = 0, which solves the equation
// trivially for a conserving start), then refines the nearest sign change.
// `eta_scale` sets the residual tolerance gamma_tol * max(|eta_scale|, 1).
double solve_gamma(const std::function<double(double)>& residual, const RelaxationConfig& config,
                   double eta_scale = 1.0);

struct RelaxationStats {
  std::size_t steps = 0;
  std::size_t residual_evaluations = 0;
  double max_abs_gamma_minus_one = 0.0;
};

// Steppers closing over a baseline method. Each call performs one baseline
// step followed by the selected relaxation.
StepOutcome quadratic_preserving_step(Stepper& stepper, std::span<const double> u, double dt,
                                      const InvariantPair& inv, const RelaxationTargets& targets,
                                      const RelaxationConfig& config,
                                      RelaxationStats* stats = nullptr);

StepOutcome standard_relaxation_step(Stepper& stepper, std::span<const double> u, double dt,
                                     const Functional& eta, double eta_target,
                                     const RelaxationConfig& config,
                                     RelaxationStats* stats = nullptr);

// Wraps a stepper according to config.mode.
StepFn make_relaxed_step(std::shared_ptr<Stepper> stepper, InvariantPair inv,
                         RelaxationTargets targets, RelaxationConfig config,
                         std::shared_ptr<RelaxationStats> stats = nullptr);

}  // namespace sbpnls
