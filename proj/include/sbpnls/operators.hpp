#pragma once

// Summation-by-parts operator sets on uniform 1D grids.
//
// An OperatorSet bundles a diagonal mass matrix M with first- and
// second-derivative operators satisfying
//
//   M D1 + D1^T M = tR tR^T - tL tL^T
//   M D2          = tR dR^T - tL dL^T - A2,   A2 symmetric positive semidefinite
//   M D+ + D-^T M = tR tR^T - tL tL^T,       M (D+ - D-) symmetric negative semidefinite
//
// with tL = tR = dL = dR = 0 on periodic grids. `dtilde` is the operator
// D2 - M^{-1} tR dR^T + M^{-1} tL dL^T = -M^{-1} A2 that enters the NLS
// semidiscretization. All members are immutable after construction and may be
// applied concurrently.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sbpnls/fft.hpp"

namespace sbpnls {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

struct Grid {
  double x_left = 0.0;
  double x_right = 1.0;
  std::size_t n_nodes = 0;
  bool periodic = true;
  double dx = 0.0;
  std::vector<double> nodes;

  static Grid make_periodic(std::size_t n, double x_left, double x_right);
  static Grid make_bounded(std::size_t n, double x_left, double x_right);

  double length() const noexcept { return x_right - x_left; }
};

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t size() const = 0;
  // y = A x. x and y must not alias.
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  // Non-null for operators stored as sparse matrices.
  virtual const SparseMatrix* sparse() const { return nullptr; }

  std::vector<double> operator()(std::span<const double> x) const;
  Eigen::MatrixXd dense() const;
};

class SparseOperator final : public LinearOperator {
 public:
  explicit SparseOperator(SparseMatrix a);
  std::size_t size() const override { return static_cast<std::size_t>(a_.rows()); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  const SparseMatrix* sparse() const override { return &a_; }

 private:
  SparseMatrix a_;
};

// Diagonal Fourier multiplier on a periodic grid, applied with real FFTs.
class SpectralOperator final : public LinearOperator {
 public:
  // multiplier has n/2 + 1 entries, one per nonnegative wavenumber index.
  SpectralOperator(std::shared_ptr<const FftPlan> plan,
                   std::vector<std::complex<double>> multiplier);
  std::size_t size() const override { return plan_->size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  std::span<const std::complex<double>> multiplier() const { return multiplier_; }

 private:
  std::shared_ptr<const FftPlan> plan_;
  std::vector<std::complex<double>> multiplier_;
};

enum class OperatorKind { fourier, central_fd, bounded_fd_sbp, upwind_fd };

std::string to_string(OperatorKind kind);
OperatorKind operator_kind_from_string(const std::string& name);

struct OperatorSet {
  Grid grid;
  OperatorKind kind = OperatorKind::fourier;
  int accuracy_order = 0;
  std::vector<double> mass_diag;
  std::shared_ptr<const LinearOperator> d1;
  std::shared_ptr<const LinearOperator> d2;
  std::shared_ptr<const LinearOperator> a2;
  std::shared_ptr<const LinearOperator> dtilde;
  std::shared_ptr<const LinearOperator> d_plus;
  std::shared_ptr<const LinearOperator> d_minus;
  std::vector<double> t_left, t_right, d_left, d_right;
  // Set for Fourier operator sets only.
  std::shared_ptr<const FftPlan> fft;

  std::size_t size() const noexcept { return grid.n_nodes; }
  bool periodic() const noexcept { return grid.periodic; }
  bool has_upwind() const noexcept { return d_plus && d_minus; }
  std::string describe() const;
};

// Fourier collocation on a periodic grid, n >= 4. D2 keeps the -k^2 multiplier
// at the Nyquist mode for even n while D1 zeroes it, so D2 == D1*D1 iff n is odd.
OperatorSet make_fourier(std::size_t n, double x_left, double x_right);

// Periodic central finite differences of order 2, 4, 6 or 8.
OperatorSet make_central_fd(int order, std::size_t n, double x_left, double x_right);

// Diagonal-norm SBP finite differences with boundary closures, interior order
// 2, 4 or 6. Order 2 reproduces the linear finite element mass/stiffness pair
// with homogeneous Neumann data.
OperatorSet make_bounded_fd_sbp(int interior_order, std::size_t n, double x_left,
                                double x_right);

// Periodic upwind pair D+/D- of order 2, 4 or 6 with D2 = D- D+.
OperatorSet make_upwind_fd(int order, std::size_t n, double x_left, double x_right);

// Dispatch by kind. `order` is ignored for Fourier.
OperatorSet make_operator_set(OperatorKind kind, int order, std::size_t n, double x_left,
                              double x_right);

struct ConformanceReport {
  // max-abs entry of M D1 + D1^T M - (tR tR^T - tL tL^T)
  double sbp1_residual = 0.0;
  // dx * max-abs entry of M D2 + A2 - tR dR^T + tL dL^T
  double sbp2_residual = 0.0;
  // dx * max-abs entry of dtilde + M^{-1} A2
  double dtilde_residual = 0.0;
  // dx * max-abs entry of A2 - A2^T
  double a2_symmetry = 0.0;
  // dx * smallest eigenvalue of A2
  double a2_min_eigenvalue = 0.0;
  // max of |D1 1|, dx|D2 1|, |D+ 1|, |D- 1|
  double consistency = 0.0;
  std::optional<double> upwind_residual;
  std::optional<double> upwind_symmetry;
  // largest eigenvalue of the symmetric part of M (D+ - D-)
  std::optional<double> upwind_max_eigenvalue;
  bool mass_positive = true;

  bool passes(double tol = 1e-12, double eig_tol = 1e-10) const;
};

ConformanceReport sbp_conformance(const OperatorSet& ops);

void write_dense_csv(std::ostream& os, const Eigen::MatrixXd& a);

}  // namespace sbpnls
