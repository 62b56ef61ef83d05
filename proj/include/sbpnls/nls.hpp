#pragma once

// Semidiscretization of i u_t + u_xx + beta |u|^2 u = 0 with u = v + i w:
//
//   v' = -Dt w - beta (v^2 + w^2) w
//   w' = +Dt v + beta (v^2 + w^2) v
//
// where Dt = D2 - M^{-1} tR dR^T + M^{-1} tL dL^T = -M^{-1} A2. States are
// flat vectors [v; w] of length 2n.

#include <cstddef>
#include <memory>
#include <span>

#include "sbpnls/ode.hpp"
#include "sbpnls/operators.hpp"

namespace sbpnls {

namespace detail {
class ComplexLuCache;
}

struct NlsParams {
  double beta = 1.0;
  std::shared_ptr<const OperatorSet> ops;

  std::size_t n() const { return ops->size(); }
};

NlsParams make_nls_params(double beta, OperatorSet ops);

// Views of the two halves of a flat state.
inline std::span<const double> real_part(std::span<const double> s, std::size_t n) {
  return s.first(n);
}
inline std::span<const double> imag_part(std::span<const double> s, std::size_t n) {
  return s.subspan(n, n);
}

Vector make_state(std::span<const double> v, std::span<const double> w);

Vector dtilde_apply(const NlsParams& p, std::span<const double> z);

void nls_rhs(const NlsParams& p, std::span<const double> s, std::span<double> out);
void nls_rhs_linear(const NlsParams& p, std::span<const double> s, std::span<double> out);
void nls_rhs_nonlinear(const NlsParams& p, std::span<const double> s, std::span<double> out);

Vector nls_rhs(const NlsParams& p, std::span<const double> s);

// Solves v + coeff Dt w = rhs_v, w - coeff Dt v = rhs_w. Fourier operator sets
// are diagonalized by the FFT; all others use a sparse LU of the complex
// matrix I - i coeff Dt, cached per coeff.
class NlsImplicitSolver {
 public:
  explicit NlsImplicitSolver(NlsParams p);
  ~NlsImplicitSolver();

  void solve(double coeff, std::span<const double> rhs, std::span<double> out) const;
  std::size_t factorizations() const;

 private:
  NlsParams p_;
  std::vector<double> wavenumber_sq_;  // Fourier only, full complex length
  std::unique_ptr<detail::ComplexLuCache> cache_;
};

double mass(const NlsParams& p, std::span<const double> s);
double energy(const NlsParams& p, std::span<const double> s);
double naive_energy(const NlsParams& p, std::span<const double> s);

SplitOde make_nls_ode(const NlsParams& p);

}  // namespace sbpnls
