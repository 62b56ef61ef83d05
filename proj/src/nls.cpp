#include "sbpnls/nls.hpp"

#include <cmath>
#include <numbers>

#include "complex_lu_cache.hpp"
#include "sbpnls/errors.hpp"
#include "sbpnls/kernels.hpp"

namespace sbpnls {

namespace {

void check_state(const NlsParams& p, std::span<const double> s, const char* who) {
  if (s.size() != 2 * p.n())
    throw InvalidArgument(std::string(who) + ": state length " + std::to_string(s.size()) +
                          " does not match 2n = " + std::to_string(2 * p.n()));
}

// sum_i m_i z_i (A2 z)_i with A2 z = -M Dt z.
double a2_quadratic(const NlsParams& p, std::span<const double> z, std::span<double> scratch) {
  p.ops->dtilde->apply(z, scratch);
  return -kernels::weighted_dot(p.ops->mass_diag, z, scratch);
}

}  // namespace

NlsParams make_nls_params(double beta, OperatorSet ops) {
  return NlsParams{beta, std::make_shared<const OperatorSet>(std::move(ops))};
}

Vector make_state(std::span<const double> v, std::span<const double> w) {
  if (v.size() != w.size()) throw InvalidArgument("make_state: v and w differ in length");
  Vector s(v.begin(), v.end());
  s.insert(s.end(), w.begin(), w.end());
  return s;
}

Vector dtilde_apply(const NlsParams& p, std::span<const double> z) {
  if (z.size() != p.n())
    throw InvalidArgument("dtilde_apply: vector length does not match the grid");
  return (*p.ops->dtilde)(z);
}

void nls_rhs_linear(const NlsParams& p, std::span<const double> s, std::span<double> out) {
  check_state(p, s, "nls_rhs_linear");
  const std::size_t n = p.n();
  auto ov = out.first(n), ow = out.subspan(n, n);
  p.ops->dtilde->apply(imag_part(s, n), ov);
  p.ops->dtilde->apply(real_part(s, n), ow);
  for (double& x : ov) x = -x;
}

void nls_rhs_nonlinear(const NlsParams& p, std::span<const double> s, std::span<double> out) {
  check_state(p, s, "nls_rhs_nonlinear");
  const std::size_t n = p.n();
  kernels::cubic_term(p.beta, real_part(s, n), imag_part(s, n), out.first(n), out.subspan(n, n));
}

void nls_rhs(const NlsParams& p, std::span<const double> s, std::span<double> out) {
  nls_rhs_linear(p, s, out);
  const std::size_t n = p.n();
  const double* v = s.data();
  const double* w = s.data() + n;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = p.beta * (v[i] * v[i] + w[i] * w[i]);
    out[i] -= rho * w[i];
    out[n + i] += rho * v[i];
  }
}

Vector nls_rhs(const NlsParams& p, std::span<const double> s) {
  Vector out(s.size());
  nls_rhs(p, s, out);
  return out;
}

// ---------------------------------------------------------------------------

NlsImplicitSolver::NlsImplicitSolver(NlsParams p)
    : p_(std::move(p)), cache_(std::make_unique<detail::ComplexLuCache>()) {
  const OperatorSet& ops = *p_.ops;
  if (ops.fft) {
    const std::size_t n = ops.size();
    const double base = 2.0 * std::numbers::pi / ops.grid.length();
    wavenumber_sq_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double k = base * (j <= n / 2 ? double(j) : double(j) - double(n));
      wavenumber_sq_[j] = k * k;
    }
  } else if (!ops.dtilde->sparse()) {
    throw InvalidArgument("NlsImplicitSolver: operator set has neither FFT nor sparse form");
  }
}

NlsImplicitSolver::~NlsImplicitSolver() = default;

std::size_t NlsImplicitSolver::factorizations() const { return cache_->factorizations(); }

void NlsImplicitSolver::solve(double coeff, std::span<const double> rhs,
                              std::span<double> out) const {
  check_state(p_, rhs, "implicit stage solve");
  const std::size_t n = p_.n();
  if (coeff == 0.0) {
    std::copy(rhs.begin(), rhs.end(), out.begin());
    return;
  }
  // (I - i coeff Dt) u = r with u = v + i w.
  std::vector<std::complex<double>> r(n), u(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = {rhs[i], rhs[n + i]};

  const OperatorSet& ops = *p_.ops;
  if (ops.fft) {
    ops.fft->forward(r, u);
    const double scale = 1.0 / static_cast<double>(n);
    // Dt has symbol -k^2, so the stage symbol is 1 + i coeff k^2.
    for (std::size_t j = 0; j < n; ++j)
      u[j] *= scale / std::complex<double>(1.0, coeff * wavenumber_sq_[j]);
    ops.fft->backward(u, r);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = r[i].real();
      out[n + i] = r[i].imag();
    }
    return;
  }

  auto lu = cache_->get(coeff, [&](double c) {
    const SparseMatrix& dt = *ops.dtilde->sparse();
    std::vector<Eigen::Triplet<std::complex<double>, int>> t;
    t.reserve(dt.nonZeros() + n);
    for (std::size_t i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
    for (int i = 0; i < dt.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(dt, i); it; ++it)
        t.emplace_back(it.row(), it.col(), std::complex<double>(0.0, -c * it.value()));
    detail::ComplexSparse a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
  });
  const detail::ComplexVector x =
      lu->solve(Eigen::Map<const detail::ComplexVector>(r.data(), static_cast<Eigen::Index>(n)));
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag()))
      throw NumericFailure("implicit stage solve produced non-finite values");
    out[i] = x[i].real();
    out[n + i] = x[i].imag();
  }
}

// ---------------------------------------------------------------------------

double mass(const NlsParams& p, std::span<const double> s) {
  check_state(p, s, "mass");
  const std::size_t n = p.n();
  const auto& m = p.ops->mass_diag;
  return kernels::weighted_dot(m, real_part(s, n), real_part(s, n)) +
         kernels::weighted_dot(m, imag_part(s, n), imag_part(s, n));
}

double energy(const NlsParams& p, std::span<const double> s) {
  check_state(p, s, "energy");
  const std::size_t n = p.n();
  std::vector<double> scratch(n);
  const double kinetic = a2_quadratic(p, real_part(s, n), scratch) +
                         a2_quadratic(p, imag_part(s, n), scratch);
  return kinetic -
         0.5 * p.beta * kernels::weighted_quartic(p.ops->mass_diag, real_part(s, n), imag_part(s, n));
}

double naive_energy(const NlsParams& p, std::span<const double> s) {
  check_state(p, s, "naive_energy");
  const std::size_t n = p.n();
  const auto& m = p.ops->mass_diag;
  std::vector<double> dv(n), dw(n);
  p.ops->d1->apply(real_part(s, n), dv);
  p.ops->d1->apply(imag_part(s, n), dw);
  return kernels::weighted_dot(m, dv, dv) + kernels::weighted_dot(m, dw, dw) -
         0.5 * p.beta * kernels::weighted_quartic(m, real_part(s, n), imag_part(s, n));
}

SplitOde make_nls_ode(const NlsParams& p) {
  auto solver = std::make_shared<NlsImplicitSolver>(p);
  SplitOde ode;
  ode.dimension = 2 * p.n();
  ode.full_rhs = [p](std::span<const double> u, std::span<double> out) { nls_rhs(p, u, out); };
  ode.linear_rhs = [p](std::span<const double> u, std::span<double> out) {
    nls_rhs_linear(p, u, out);
  };
  ode.nonlinear_rhs = [p](std::span<const double> u, std::span<double> out) {
    nls_rhs_nonlinear(p, u, out);
  };
  ode.implicit_solve = [solver](double c, std::span<const double> rhs, std::span<double> out) {
    solver->solve(c, rhs, out);
  };
  return ode;
}

}  // namespace sbpnls
