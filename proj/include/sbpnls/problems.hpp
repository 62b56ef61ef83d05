#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbpnls/ode.hpp"
#include "sbpnls/operators.hpp"

namespace sbpnls {

using StateFn = std::function<Vector(const Grid&)>;
using TrajectoryFn = std::function<Vector(const Grid&, double t)>;

struct ProblemSpec {
  std::string name;
  double beta = 1.0;
  double x_left = 0.0;
  double x_right = 1.0;
  bool periodic = true;
  StateFn initial_state;
  TrajectoryFn exact_solution;  // empty when only reference solutions exist
  double default_horizon = 1.0;

  bool has_exact() const { return static_cast<bool>(exact_solution); }
};

// sech(x + 4t) exp(-i(2x + 3t)), a solution for beta = 2.
Vector one_soliton(const Grid& g, double t);

// order_n * sech(x), order_n in {2, 3}, beta = 2.
Vector bound_state_soliton(int order_n, const Grid& g);

// Closed-form evolution of 2 sech(x) under i u_t + u_xx + 2|u|^2 u = 0:
//   u = 4 e^{it} (cosh 3x + 3 e^{8it} cosh x) / (cosh 4x + 4 cosh 2x + 3 cos 8t)
Vector two_soliton(const Grid& g, double t);

// Gray soliton of the defocusing equation (beta = -1) with density
//   rho = b1 - (b1 - b2) sech^2(sqrt(b1 - b2) (x/sqrt2 - c t))
// and phase gradient theta_x = (c - b1 sqrt(b2) / rho) / sqrt2. The right
// end of the domain is chosen so the phase winds by a whole number of turns.
class GraySoliton {
 public:
  GraySoliton(double b1 = 1.5, double b2 = 1.0, double c = 2.0, double x_left = -30.0,
              double min_length = 60.0);

  double b1() const { return b1_; }
  double b2() const { return b2_; }
  double c() const { return c_; }
  double x_left() const { return x_left_; }
  double x_right() const { return x_right_; }
  int winding() const { return winding_; }
  double speed() const;  // translation speed of the profile

  double density(double x, double t = 0.0) const;
  double velocity(double x, double t = 0.0) const;
  // Phase relative to x_left, by adaptive Gauss-Kronrod quadrature.
  double phase(double x) const;

  // Samples u(x, t); the exact evolution is a periodic translation.
  Vector sample(const Grid& g, double t = 0.0) const;
  std::vector<double> sample_density(const Grid& g, double t) const;

 private:
  double b1_, b2_, c_, x_left_, x_right_ = 0.0;
  int winding_ = 0;
};

// Smoothed Riemann data rho = 1.5 - 0.5 tanh(100 x), theta = 0 (beta = -1).
Vector dispersive_shock(const Grid& g);

struct HydroFields {
  std::vector<double> rho;
  std::vector<double> theta;
  std::vector<double> vel;
  std::vector<bool> valid;  // false where rho is below the vacuum threshold
};

HydroFields to_hydro(std::span<const double> state, const OperatorSet& ops,
                     double vacuum_threshold = 1e-8);

double l2_error(const OperatorSet& ops, std::span<const double> a, std::span<const double> b);

// L2 error of the mass density |u|^2.
double density_l2_error(const OperatorSet& ops, std::span<const double> a,
                        std::span<const double> b);

// Least-squares slope of log(error) against log(time), samples with
// time < t_floor dropped. Throws FitFailure on degenerate data.
double growth_fit(std::span<const double> times, std::span<const double> errors,
                  double t_floor = 0.0);

// Registry: "one_soliton", "two_soliton", "three_soliton", "gray_soliton",
// "dispersive_shock".
ProblemSpec problem_by_name(const std::string& name);
std::vector<std::string> problem_names();

}  // namespace sbpnls
