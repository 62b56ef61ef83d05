#pragma once

// Hyperbolic approximation of the NLS with relaxation parameter tau. With
// q0 = v + i w and q1 = nu + i omega the semidiscretization reads
//
//   v'     = -D- omega - beta (v^2 + w^2) w
//   w'     =  D- nu    + beta (v^2 + w^2) v
//   nu'    = ( D+ w - omega) / tau
//   omega' = (-D+ v + nu)    / tau
//
// on periodic upwind SBP pairs. States are flat vectors [v; w; nu; omega].

#include <memory>
#include <span>

#include "sbpnls/ode.hpp"
#include "sbpnls/operators.hpp"

namespace sbpnls {

namespace detail {
class ComplexLuCache;
}

struct HypParams {
  double beta = 1.0;
  double tau = 1e-4;
  std::shared_ptr<const OperatorSet> ops;

  std::size_t n() const { return ops->size(); }
};

// Validates tau > 0 and the presence of an upwind pair.
HypParams make_hyp_params(double beta, double tau, OperatorSet ops);

void hyp_rhs(const HypParams& p, std::span<const double> s, std::span<double> out);
void hyp_rhs_linear(const HypParams& p, std::span<const double> s, std::span<double> out);
void hyp_rhs_nonlinear(const HypParams& p, std::span<const double> s, std::span<double> out);
Vector hyp_rhs(const HypParams& p, std::span<const double> s);

// Solves s - coeff * L s = rhs for the linear block L by eliminating q1 and
// factoring I - kappa D- D+ (complex, sparse, cached per coeff).
class HypImplicitSolver {
 public:
  explicit HypImplicitSolver(HypParams p);
  ~HypImplicitSolver();

  void solve(double coeff, std::span<const double> rhs, std::span<double> out) const;
  std::size_t factorizations() const;

 private:
  HypParams p_;
  SparseMatrix dminus_dplus_;
  std::unique_ptr<detail::ComplexLuCache> cache_;
};

double hyp_mass(const HypParams& p, std::span<const double> s);
double hyp_energy(const HypParams& p, std::span<const double> s);

Vector well_prepared_init(const HypParams& p, std::span<const double> v0,
                          std::span<const double> w0);

struct EllipsoidScaling {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
};

// Scale factors (1 + s, 1 + tau s) with q (1+s)^2 + tau p (1 + tau s)^2 = c,
// q = |q0|_M^2, p = |q1|_M^2, c = target mass. Throws ProjectionFailure when
// the target cannot be reached along this direction.
EllipsoidScaling ellipsoid_scaling(double q, double p, double tau, double c);

Vector project_mass_ellipsoid(const HypParams& p, std::span<const double> s, double target_mass);

SplitOde make_hyp_ode(const HypParams& p);

}  // namespace sbpnls
