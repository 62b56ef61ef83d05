#include "sbpnls/operators.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <utility>

#include "sbpnls/errors.hpp"
#include "sbpnls/kernels.hpp"

namespace sbpnls {

namespace {

using Triplet = Eigen::Triplet<double, int>;
using Stencil = std::vector<std::pair<int, double>>;  // (offset, coefficient)
using Block = std::vector<std::vector<double>>;       // boundary rows, columns from 0

constexpr double frac(double num, double den) { return num / den; }

// Antisymmetric central first-derivative stencils, coefficients for offsets 1..q.
const std::vector<double>& central_d1(int order) {
  static const std::vector<double> o2{frac(1, 2)};
  static const std::vector<double> o4{frac(2, 3), frac(-1, 12)};
  static const std::vector<double> o6{frac(3, 4), frac(-3, 20), frac(1, 60)};
  static const std::vector<double> o8{frac(4, 5), frac(-1, 5), frac(4, 105), frac(-1, 280)};
  switch (order) {
    case 2: return o2;
    case 4: return o4;
    case 6: return o6;
    case 8: return o8;
    default: throw InvalidArgument("unsupported central difference order " + std::to_string(order));
  }
}

// Symmetric central second-derivative stencils: center followed by offsets 1..q.
const std::vector<double>& central_d2(int order) {
  static const std::vector<double> o2{-2.0, 1.0};
  static const std::vector<double> o4{frac(-5, 2), frac(4, 3), frac(-1, 12)};
  static const std::vector<double> o6{frac(-49, 18), frac(3, 2), frac(-3, 20), frac(1, 90)};
  static const std::vector<double> o8{frac(-205, 72), frac(8, 5), frac(-1, 5), frac(8, 315),
                                      frac(-1, 560)};
  switch (order) {
    case 2: return o2;
    case 4: return o4;
    case 6: return o6;
    case 8: return o8;
    default: throw InvalidArgument("unsupported central difference order " + std::to_string(order));
  }
}

Stencil d1_stencil(int order) {
  Stencil s;
  const auto& c = central_d1(order);
  for (std::size_t k = 0; k < c.size(); ++k) {
    s.emplace_back(static_cast<int>(k + 1), c[k]);
    s.emplace_back(-static_cast<int>(k + 1), -c[k]);
  }
  return s;
}

Stencil d2_stencil(int order) {
  Stencil s;
  const auto& c = central_d2(order);
  s.emplace_back(0, c[0]);
  for (std::size_t k = 1; k < c.size(); ++k) {
    s.emplace_back(static_cast<int>(k), c[k]);
    s.emplace_back(-static_cast<int>(k), c[k]);
  }
  return s;
}

// Upwind D+ stencils: the maximal-order stencil on offsets -(q-1) .. q+1.
Stencil upwind_plus_stencil(int order) {
  switch (order) {
    case 2: return {{0, frac(-3, 2)}, {1, 2.0}, {2, frac(-1, 2)}};
    case 4:
      return {{-1, frac(-1, 4)}, {0, frac(-5, 6)}, {1, frac(3, 2)}, {2, frac(-1, 2)},
              {3, frac(1, 12)}};
    case 6:
      return {{-2, frac(1, 30)}, {-1, frac(-2, 5)}, {0, frac(-7, 12)}, {1, frac(4, 3)},
              {2, frac(-1, 2)},  {3, frac(2, 15)},  {4, frac(-1, 60)}};
    default: throw InvalidArgument("unsupported upwind order " + std::to_string(order));
  }
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Triplet>& t) {
  SparseMatrix a(static_cast<int>(n), static_cast<int>(n));
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

SparseMatrix circulant(std::size_t n, const Stencil& stencil, double scale) {
  std::vector<Triplet> t;
  t.reserve(n * stencil.size());
  const auto ni = static_cast<long>(n);
  for (long i = 0; i < ni; ++i)
    for (auto [off, c] : stencil) t.emplace_back(i, static_cast<int>(((i + off) % ni + ni) % ni), c * scale);
  return from_triplets(n, t);
}

// Boundary block on the left, its mirror image (times `mirror_sign`) on the
// right, and an interior stencil in between.
SparseMatrix bounded(std::size_t n, const Block& block, const Stencil& interior,
                     double mirror_sign, double scale) {
  std::vector<Triplet> t;
  const auto nb = static_cast<long>(block.size());
  const auto ni = static_cast<long>(n);
  for (long i = 0; i < nb; ++i)
    for (long j = 0; j < static_cast<long>(block[i].size()); ++j) {
      const double c = block[i][j];
      if (c == 0.0) continue;
      t.emplace_back(i, j, c * scale);
      t.emplace_back(ni - 1 - i, ni - 1 - j, mirror_sign * c * scale);
    }
  for (long i = nb; i < ni - nb; ++i)
    for (auto [off, c] : interior) t.emplace_back(i, i + off, c * scale);
  return from_triplets(n, t);
}

SparseMatrix diagonal(std::span<const double> d) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  return from_triplets(d.size(), t);
}

SparseMatrix outer(std::span<const double> a, std::span<const double> b) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (b[j] != 0.0) t.emplace_back(i, j, a[i] * b[j]);
  }
  return from_triplets(a.size(), t);
}

std::shared_ptr<const LinearOperator> sparse_op(SparseMatrix a) {
  a.prune(0.0);
  return std::make_shared<SparseOperator>(std::move(a));
}

// Diagonal-norm SBP coefficients. Each closure lists the left norm weights,
// the first-derivative boundary rows and (for the narrow-stencil cases) the
// second-derivative boundary rows and the boundary derivative vector dL.
struct BoundedClosure {
  std::vector<double> norm;
  Block d1;
  Block d2;
  std::vector<double> d_left;
};

BoundedClosure bounded_closure(int order) {
  switch (order) {
    case 2:
      return {{frac(1, 2)}, {{-1.0, 1.0}}, {{1.0, -2.0, 1.0}}, {frac(-3, 2), 2.0, frac(-1, 2)}};
    case 4:
      return {{frac(17, 48), frac(59, 48), frac(43, 48), frac(49, 48)},
              {{frac(-24, 17), frac(59, 34), frac(-4, 17), frac(-3, 34)},
               {frac(-1, 2), 0.0, frac(1, 2)},
               {frac(4, 43), frac(-59, 86), 0.0, frac(59, 86), frac(-4, 43)},
               {frac(3, 98), 0.0, frac(-59, 98), 0.0, frac(32, 49), frac(-4, 49)}},
              {{2.0, -5.0, 4.0, -1.0},
               {1.0, -2.0, 1.0},
               {frac(-4, 43), frac(59, 43), frac(-110, 43), frac(59, 43), frac(-4, 43)},
               {frac(-1, 49), 0.0, frac(59, 49), frac(-118, 49), frac(64, 49), frac(-4, 49)}},
              {frac(-11, 6), 3.0, frac(-3, 2), frac(1, 3)}};
    case 6:
      return {{frac(13649, 43200), frac(12013, 8640), frac(2711, 4320), frac(5359, 4320),
               frac(7877, 8640), frac(43801, 43200)},
              {{frac(-21600, 13649), frac(104009, 54596), frac(30443, 81894),
                frac(-33311, 27298), frac(16863, 27298), frac(-15025, 163788)},
               {frac(-104009, 240260), 0.0, frac(-311, 72078), frac(20229, 24026),
                frac(-24337, 48052), frac(36661, 360390)},
               {frac(-30443, 162660), frac(311, 32532), 0.0, frac(-11155, 16266),
                frac(41287, 32532), frac(-21999, 54220)},
               {frac(33311, 107180), frac(-20229, 21436), frac(485, 1398), 0.0,
                frac(4147, 21436), frac(25427, 321540), frac(72, 5359)},
               {frac(-16863, 78770), frac(24337, 31508), frac(-41287, 47262),
                frac(-4147, 15754), 0.0, frac(342523, 472620), frac(-1296, 7877),
                frac(144, 7877)},
               {frac(15025, 525612), frac(-36661, 262806), frac(21999, 87602),
                frac(-25427, 262806), frac(-342523, 525612), 0.0, frac(32400, 43801),
                frac(-6480, 43801), frac(720, 43801)}},
              {},
              {}};
    default:
      throw InvalidArgument("unsupported bounded SBP interior order " + std::to_string(order));
  }
}

std::size_t closure_width(const Block& b) {
  std::size_t w = 0;
  for (const auto& row : b) w = std::max(w, row.size());
  return w;
}

void require_periodic_size(int order, std::size_t n, const char* who) {
  if (n <= static_cast<std::size_t>(2 * order))
    throw InvalidArgument(std::string(who) + ": need n > 2*order, got n=" + std::to_string(n));
}

}  // namespace

// ---------------------------------------------------------------------------

Grid Grid::make_periodic(std::size_t n, double x_left, double x_right) {
  if (n == 0) throw InvalidArgument("grid needs at least one node");
  if (!(x_right > x_left)) throw InvalidArgument("grid needs x_right > x_left");
  Grid g;
  g.x_left = x_left;
  g.x_right = x_right;
  g.n_nodes = n;
  g.periodic = true;
  g.dx = (x_right - x_left) / static_cast<double>(n);
  g.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.nodes[i] = x_left + static_cast<double>(i) * g.dx;
  return g;
}

Grid Grid::make_bounded(std::size_t n, double x_left, double x_right) {
  if (n < 2) throw InvalidArgument("bounded grid needs at least two nodes");
  if (!(x_right > x_left)) throw InvalidArgument("grid needs x_right > x_left");
  Grid g;
  g.x_left = x_left;
  g.x_right = x_right;
  g.n_nodes = n;
  g.periodic = false;
  g.dx = (x_right - x_left) / static_cast<double>(n - 1);
  g.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.nodes[i] = x_left + static_cast<double>(i) * g.dx;
  g.nodes[n - 1] = x_right;
  return g;
}

std::vector<double> LinearOperator::operator()(std::span<const double> x) const {
  std::vector<double> y(size());
  apply(x, y);
  return y;
}

Eigen::MatrixXd LinearOperator::dense() const {
  const std::size_t n = size();
  Eigen::MatrixXd a(n, n);
  std::vector<double> e(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply(e, col);
    for (std::size_t i = 0; i < n; ++i) a(i, j) = col[i];
    e[j] = 0.0;
  }
  return a;
}

SparseOperator::SparseOperator(SparseMatrix a) : a_(std::move(a)) { a_.makeCompressed(); }

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  kernels::CsrView view{static_cast<std::size_t>(a_.rows()), static_cast<std::size_t>(a_.cols()),
                        a_.outerIndexPtr(), a_.innerIndexPtr(), a_.valuePtr()};
  kernels::csr_apply(view, x, y);
}

SpectralOperator::SpectralOperator(std::shared_ptr<const FftPlan> plan,
                                   std::vector<std::complex<double>> multiplier)
    : plan_(std::move(plan)), multiplier_(std::move(multiplier)) {
  if (multiplier_.size() != plan_->half_size())
    throw InvalidArgument("SpectralOperator: multiplier length must be n/2 + 1");
}

void SpectralOperator::apply(std::span<const double> x, std::span<double> y) const {
  thread_local std::vector<std::complex<double>> spectrum;
  spectrum.resize(plan_->half_size());
  plan_->forward_real(x, spectrum);
  const double scale = 1.0 / static_cast<double>(plan_->size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= multiplier_[k] * scale;
  plan_->backward_real(spectrum, y);
}

std::string to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::fourier: return "fourier";
    case OperatorKind::central_fd: return "central_fd";
    case OperatorKind::bounded_fd_sbp: return "bounded_fd_sbp";
    case OperatorKind::upwind_fd: return "upwind_fd";
  }
  return "unknown";
}

OperatorKind operator_kind_from_string(const std::string& name) {
  if (name == "fourier") return OperatorKind::fourier;
  if (name == "central_fd") return OperatorKind::central_fd;
  if (name == "bounded_fd_sbp") return OperatorKind::bounded_fd_sbp;
  if (name == "upwind_fd") return OperatorKind::upwind_fd;
  throw InvalidArgument("unknown operator kind '" + name + "'");
}

std::string OperatorSet::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  if (kind != OperatorKind::fourier) os << " order " << accuracy_order;
  os << ", n=" << grid.n_nodes << ", [" << grid.x_left << ", " << grid.x_right << "]";
  return os.str();
}

OperatorSet make_fourier(std::size_t n, double x_left, double x_right) {
  if (n < 4) throw InvalidArgument("make_fourier: need n >= 4, got " + std::to_string(n));
  OperatorSet ops;
  ops.grid = Grid::make_periodic(n, x_left, x_right);
  ops.kind = OperatorKind::fourier;
  ops.accuracy_order = static_cast<int>(n);
  ops.mass_diag.assign(n, ops.grid.dx);
  ops.fft = std::make_shared<FftPlan>(n);

  const std::size_t half = n / 2 + 1;
  const double base = 2.0 * std::numbers::pi / ops.grid.length();
  std::vector<std::complex<double>> m1(half), m2(half), ma(half);
  for (std::size_t j = 0; j < half; ++j) {
    const double k = base * static_cast<double>(j);
    const bool nyquist = (n % 2 == 0) && (j == n / 2);
    m1[j] = nyquist ? 0.0 : std::complex<double>(0.0, k);
    m2[j] = -k * k;
    ma[j] = ops.grid.dx * k * k;
  }
  ops.d1 = std::make_shared<SpectralOperator>(ops.fft, std::move(m1));
  auto d2 = std::make_shared<SpectralOperator>(ops.fft, std::move(m2));
  ops.d2 = d2;
  ops.dtilde = d2;
  ops.a2 = std::make_shared<SpectralOperator>(ops.fft, std::move(ma));
  ops.t_left = ops.t_right = ops.d_left = ops.d_right = std::vector<double>(n, 0.0);
  return ops;
}

OperatorSet make_central_fd(int order, std::size_t n, double x_left, double x_right) {
  central_d1(order);  // validates the order
  require_periodic_size(order, n, "make_central_fd");
  OperatorSet ops;
  ops.grid = Grid::make_periodic(n, x_left, x_right);
  ops.kind = OperatorKind::central_fd;
  ops.accuracy_order = order;
  const double dx = ops.grid.dx;
  ops.mass_diag.assign(n, dx);
  ops.d1 = sparse_op(circulant(n, d1_stencil(order), 1.0 / dx));
  SparseMatrix d2 = circulant(n, d2_stencil(order), 1.0 / (dx * dx));
  ops.a2 = sparse_op(-dx * d2);
  ops.d2 = sparse_op(d2);
  ops.dtilde = ops.d2;
  ops.t_left = ops.t_right = ops.d_left = ops.d_right = std::vector<double>(n, 0.0);
  return ops;
}

OperatorSet make_upwind_fd(int order, std::size_t n, double x_left, double x_right) {
  const Stencil plus = upwind_plus_stencil(order);
  require_periodic_size(order, n, "make_upwind_fd");
  OperatorSet ops;
  ops.grid = Grid::make_periodic(n, x_left, x_right);
  ops.kind = OperatorKind::upwind_fd;
  ops.accuracy_order = order;
  const double dx = ops.grid.dx;
  ops.mass_diag.assign(n, dx);
  SparseMatrix dp = circulant(n, plus, 1.0 / dx);
  SparseMatrix dm = SparseMatrix(-SparseMatrix(dp.transpose()));
  SparseMatrix d1 = 0.5 * (dp + dm);
  SparseMatrix d2 = dm * dp;
  ops.a2 = sparse_op(-dx * d2);
  ops.d2 = sparse_op(d2);
  ops.dtilde = ops.d2;
  ops.d1 = sparse_op(d1);
  ops.d_plus = sparse_op(dp);
  ops.d_minus = sparse_op(dm);
  ops.t_left = ops.t_right = ops.d_left = ops.d_right = std::vector<double>(n, 0.0);
  return ops;
}

OperatorSet make_bounded_fd_sbp(int interior_order, std::size_t n, double x_left,
                                double x_right) {
  const BoundedClosure closure = bounded_closure(interior_order);
  const std::size_t width = std::max(closure_width(closure.d1), closure_width(closure.d2));
  const std::size_t min_n = interior_order == 2 ? 3 : 2 * width;
  if (n < min_n)
    throw InvalidArgument("make_bounded_fd_sbp: order " + std::to_string(interior_order) +
                          " needs n >= " + std::to_string(min_n) + ", got " + std::to_string(n));

  OperatorSet ops;
  ops.grid = Grid::make_bounded(n, x_left, x_right);
  ops.kind = OperatorKind::bounded_fd_sbp;
  ops.accuracy_order = interior_order;
  const double dx = ops.grid.dx;

  ops.mass_diag.assign(n, dx);
  for (std::size_t i = 0; i < closure.norm.size(); ++i) {
    ops.mass_diag[i] = closure.norm[i] * dx;
    ops.mass_diag[n - 1 - i] = closure.norm[i] * dx;
  }
  std::vector<double> inv_mass(n);
  for (std::size_t i = 0; i < n; ++i) inv_mass[i] = 1.0 / ops.mass_diag[i];
  const SparseMatrix m = diagonal(ops.mass_diag);
  const SparseMatrix m_inv = diagonal(inv_mass);

  SparseMatrix d1 = bounded(n, closure.d1, d1_stencil(interior_order), -1.0, 1.0 / dx);
  ops.t_left.assign(n, 0.0);
  ops.t_right.assign(n, 0.0);
  ops.t_left[0] = 1.0;
  ops.t_right[n - 1] = 1.0;
  ops.d_left.assign(n, 0.0);
  ops.d_right.assign(n, 0.0);

  SparseMatrix d2, a2;
  if (!closure.d2.empty()) {
    d2 = bounded(n, closure.d2, d2_stencil(interior_order), 1.0, 1.0 / (dx * dx));
    for (std::size_t j = 0; j < closure.d_left.size(); ++j) {
      ops.d_left[j] = closure.d_left[j] / dx;
      ops.d_right[n - 1 - j] = -closure.d_left[j] / dx;
    }
    a2 = outer(ops.t_right, ops.d_right) - outer(ops.t_left, ops.d_left) - SparseMatrix(m * d2);
  } else {
    // Wide-stencil second derivative D2 = D1 D1 with dL = D1^T tL, dR = D1^T tR
    // and A2 = D1^T M D1.
    d2 = d1 * d1;
    for (SparseMatrix::InnerIterator it(d1, 0); it; ++it) ops.d_left[it.col()] = it.value();
    for (SparseMatrix::InnerIterator it(d1, static_cast<int>(n - 1)); it; ++it)
      ops.d_right[it.col()] = it.value();
    a2 = SparseMatrix(d1.transpose()) * m * d1;
  }
  ops.dtilde = sparse_op(-(m_inv * a2));
  ops.d1 = sparse_op(std::move(d1));
  ops.d2 = sparse_op(std::move(d2));
  ops.a2 = sparse_op(std::move(a2));
  return ops;
}

OperatorSet make_operator_set(OperatorKind kind, int order, std::size_t n, double x_left,
                              double x_right) {
  switch (kind) {
    case OperatorKind::fourier: return make_fourier(n, x_left, x_right);
    case OperatorKind::central_fd: return make_central_fd(order, n, x_left, x_right);
    case OperatorKind::bounded_fd_sbp: return make_bounded_fd_sbp(order, n, x_left, x_right);
    case OperatorKind::upwind_fd: return make_upwind_fd(order, n, x_left, x_right);
  }
  throw InvalidArgument("unknown operator kind");
}

// ---------------------------------------------------------------------------

bool ConformanceReport::passes(double tol, double eig_tol) const {
  bool ok = mass_positive && sbp1_residual <= tol && sbp2_residual <= tol &&
            dtilde_residual <= tol && a2_symmetry <= tol && a2_min_eigenvalue >= -eig_tol &&
            consistency <= tol * 100;
  if (upwind_residual) ok = ok && *upwind_residual <= tol;
  if (upwind_symmetry) ok = ok && *upwind_symmetry <= tol;
  if (upwind_max_eigenvalue) ok = ok && *upwind_max_eigenvalue <= eig_tol;
  return ok;
}

ConformanceReport sbp_conformance(const OperatorSet& ops) {
  ConformanceReport r;
  const std::size_t n = ops.size();
  const double dx = ops.grid.dx;
  const Eigen::Map<const Eigen::VectorXd> mvec(ops.mass_diag.data(), n);
  const Eigen::Map<const Eigen::VectorXd> tl(ops.t_left.data(), n), tr(ops.t_right.data(), n);
  const Eigen::Map<const Eigen::VectorXd> dl(ops.d_left.data(), n), dr(ops.d_right.data(), n);
  r.mass_positive = (mvec.array() > 0.0).all();

  const Eigen::MatrixXd m = mvec.asDiagonal();
  const Eigen::MatrixXd b = tr * tr.transpose() - tl * tl.transpose();
  const Eigen::MatrixXd d1 = ops.d1->dense();
  const Eigen::MatrixXd d2 = ops.d2->dense();
  const Eigen::MatrixXd a2 = ops.a2->dense();
  const Eigen::MatrixXd dt = ops.dtilde->dense();

  r.sbp1_residual = (m * d1 + d1.transpose() * m - b).cwiseAbs().maxCoeff();
  r.sbp2_residual =
      dx * (m * d2 + a2 - tr * dr.transpose() + tl * dl.transpose()).cwiseAbs().maxCoeff();
  r.dtilde_residual = dx * (dt + mvec.cwiseInverse().asDiagonal() * a2).cwiseAbs().maxCoeff();
  r.a2_symmetry = dx * (a2 - a2.transpose()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXd a2_sym = 0.5 * (a2 + a2.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a2_sym, Eigen::EigenvaluesOnly);
  r.a2_min_eigenvalue = dx * eig.eigenvalues().minCoeff();

  const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);
  r.consistency = std::max((d1 * one).cwiseAbs().maxCoeff(), dx * (d2 * one).cwiseAbs().maxCoeff());

  if (ops.has_upwind()) {
    const Eigen::MatrixXd dp = ops.d_plus->dense();
    const Eigen::MatrixXd dm = ops.d_minus->dense();
    r.upwind_residual = (m * dp + dm.transpose() * m - b).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd diss = m * (dp - dm);
    r.upwind_symmetry = (diss - diss.transpose()).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd diss_sym = 0.5 * (diss + diss.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eu(diss_sym, Eigen::EigenvaluesOnly);
    r.upwind_max_eigenvalue = eu.eigenvalues().maxCoeff();
    r.consistency = std::max({r.consistency, (dp * one).cwiseAbs().maxCoeff(),
                              (dm * one).cwiseAbs().maxCoeff()});
  }
  return r;
}

void write_dense_csv(std::ostream& os, const Eigen::MatrixXd& a) {
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) os << (j ? "," : "") << a(i, j);
    os << '\n';
  }
}

}  // namespace sbpnls
