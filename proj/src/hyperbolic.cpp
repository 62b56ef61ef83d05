#include "sbpnls/hyperbolic.hpp"

#include <cmath>
#include <complex>

#include "complex_lu_cache.hpp"
#include "sbpnls/errors.hpp"
#include "sbpnls/kernels.hpp"

namespace sbpnls {

namespace {

using cplx = std::complex<double>;

void check_state(const HypParams& p, std::span<const double> s, const char* who) {
  if (s.size() != 4 * p.n())
    throw InvalidArgument(std::string(who) + ": state length " + std::to_string(s.size()) +
                          " does not match 4n = " + std::to_string(4 * p.n()));
}

struct Parts {
  std::span<const double> v, w, nu, om;
};

Parts split(std::span<const double> s, std::size_t n) {
  return {s.subspan(0, n), s.subspan(n, n), s.subspan(2 * n, n), s.subspan(3 * n, n)};
}

}  // namespace

HypParams make_hyp_params(double beta, double tau, OperatorSet ops) {
  if (!(tau > 0.0)) throw InvalidArgument("hyperbolic system needs tau > 0");
  if (!ops.has_upwind()) throw InvalidArgument("hyperbolic system needs an upwind operator pair");
  if (!ops.periodic()) throw InvalidArgument("hyperbolic system is implemented for periodic grids");
  return HypParams{beta, tau, std::make_shared<const OperatorSet>(std::move(ops))};
}

void hyp_rhs_linear(const HypParams& p, std::span<const double> s, std::span<double> out) {
  check_state(p, s, "hyp_rhs_linear");
  const std::size_t n = p.n();
  const Parts q = split(s, n);
  auto ov = out.subspan(0, n), ow = out.subspan(n, n);
  auto onu = out.subspan(2 * n, n), oom = out.subspan(3 * n, n);
  p.ops->d_minus->apply(q.om, ov);
  p.ops->d_minus->apply(q.nu, ow);
  p.ops->d_plus->apply(q.w, onu);
  p.ops->d_plus->apply(q.v, oom);
  const double inv_tau = 1.0 / p.tau;
  for (std::size_t i = 0; i < n; ++i) {
    ov[i] = -ov[i];
    onu[i] = (onu[i] - q.om[i]) * inv_tau;
    oom[i] = (-oom[i] + q.nu[i]) * inv_tau;
  }
}

void hyp_rhs_nonlinear(const HypParams& p, std::span<const double> s, std::span<double> out) {
  check_state(p, s, "hyp_rhs_nonlinear");
  const std::size_t n = p.n();
  kernels::cubic_term(p.beta, s.subspan(0, n), s.subspan(n, n), out.subspan(0, n),
                      out.subspan(n, n));
  std::fill(out.begin() + 2 * n, out.end(), 0.0);
}

void hyp_rhs(const HypParams& p, std::span<const double> s, std::span<double> out) {
  hyp_rhs_linear(p, s, out);
  const std::size_t n = p.n();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = s[i], w = s[n + i];
    const double rho = p.beta * (v * v + w * w);
    out[i] -= rho * w;
    out[n + i] += rho * v;
  }
}

Vector hyp_rhs(const HypParams& p, std::span<const double> s) {
  Vector out(s.size());
  hyp_rhs(p, s, out);
  return out;
}

// ---------------------------------------------------------------------------

HypImplicitSolver::HypImplicitSolver(HypParams p)
    : p_(std::move(p)), cache_(std::make_unique<detail::ComplexLuCache>()) {
  const SparseMatrix* dp = p_.ops->d_plus->sparse();
  const SparseMatrix* dm = p_.ops->d_minus->sparse();
  if (!dp || !dm) throw InvalidArgument("HypImplicitSolver: upwind operators must be sparse");
  dminus_dplus_ = SparseMatrix((*dm) * (*dp));
}

HypImplicitSolver::~HypImplicitSolver() = default;

std::size_t HypImplicitSolver::factorizations() const { return cache_->factorizations(); }

void HypImplicitSolver::solve(double coeff, std::span<const double> rhs,
                              std::span<double> out) const {
  check_state(p_, rhs, "hyperbolic implicit stage solve");
  const std::size_t n = p_.n();
  if (coeff == 0.0) {
    std::copy(rhs.begin(), rhs.end(), out.begin());
    return;
  }
  // Complex form: q0' = i D- q1, q1' = (-i D+ q0 + i q1) / tau. Eliminating
  //   q1 = (r1 - i (c/tau) D+ q0) / (1 - i c/tau)
  // leaves [I - kappa D- D+] q0 = r0 + i c D- r1 / (1 - i c/tau),
  // kappa = (c^2/tau) / (1 - i c/tau).
  const double c = coeff;
  const cplx denom(1.0, -c / p_.tau);
  const cplx kappa = (c * c / p_.tau) / denom;

  const Parts r = split(rhs, n);
  std::vector<double> dm_r1_re(n), dm_r1_im(n);
  p_.ops->d_minus->apply(r.nu, dm_r1_re);
  p_.ops->d_minus->apply(r.om, dm_r1_im);
  detail::ComplexVector b(n);
  const cplx ic_over(0.0, c);
  for (std::size_t i = 0; i < n; ++i)
    b[i] = cplx(r.v[i], r.w[i]) + ic_over * cplx(dm_r1_re[i], dm_r1_im[i]) / denom;

  auto lu = cache_->get(coeff, [&](double) {
    std::vector<Eigen::Triplet<cplx, int>> t;
    t.reserve(dminus_dplus_.nonZeros() + n);
    for (std::size_t i = 0; i < n; ++i) t.emplace_back(i, i, 1.0);
    for (int i = 0; i < dminus_dplus_.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(dminus_dplus_, i); it; ++it)
        t.emplace_back(it.row(), it.col(), -kappa * it.value());
    detail::ComplexSparse a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
  });
  const detail::ComplexVector q0 = lu->solve(b);

  std::vector<double> q0_re(n), q0_im(n), dp_re(n), dp_im(n);
  for (std::size_t i = 0; i < n; ++i) {
    q0_re[i] = q0[i].real();
    q0_im[i] = q0[i].imag();
  }
  p_.ops->d_plus->apply(q0_re, dp_re);
  p_.ops->d_plus->apply(q0_im, dp_im);
  const cplx ic_tau(0.0, c / p_.tau);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx q1 = (cplx(r.nu[i], r.om[i]) - ic_tau * cplx(dp_re[i], dp_im[i])) / denom;
    out[i] = q0_re[i];
    out[n + i] = q0_im[i];
    out[2 * n + i] = q1.real();
    out[3 * n + i] = q1.imag();
    if (!std::isfinite(q1.real()) || !std::isfinite(q1.imag()) || !std::isfinite(q0_re[i]) ||
        !std::isfinite(q0_im[i]))
      throw NumericFailure("hyperbolic implicit stage solve produced non-finite values");
  }
}

// ---------------------------------------------------------------------------

double hyp_mass(const HypParams& p, std::span<const double> s) {
  check_state(p, s, "hyp_mass");
  const Parts q = split(s, p.n());
  const auto& m = p.ops->mass_diag;
  return kernels::weighted_dot(m, q.v, q.v) + kernels::weighted_dot(m, q.w, q.w) +
         p.tau * (kernels::weighted_dot(m, q.nu, q.nu) + kernels::weighted_dot(m, q.om, q.om));
}

double hyp_energy(const HypParams& p, std::span<const double> s) {
  check_state(p, s, "hyp_energy");
  const std::size_t n = p.n();
  const Parts q = split(s, n);
  const auto& m = p.ops->mass_diag;
  std::vector<double> dv(n), dw(n);
  p.ops->d_plus->apply(q.v, dv);
  p.ops->d_plus->apply(q.w, dw);
  return 2.0 * kernels::weighted_dot(m, q.nu, dv) - kernels::weighted_dot(m, q.nu, q.nu) +
         2.0 * kernels::weighted_dot(m, q.om, dw) - kernels::weighted_dot(m, q.om, q.om) -
         0.5 * p.beta * kernels::weighted_quartic(m, q.v, q.w);
}

Vector well_prepared_init(const HypParams& p, std::span<const double> v0,
                          std::span<const double> w0) {
  const std::size_t n = p.n();
  if (v0.size() != n || w0.size() != n)
    throw InvalidArgument("well_prepared_init: vectors do not match the grid");
  Vector s(4 * n);
  std::copy(v0.begin(), v0.end(), s.begin());
  std::copy(w0.begin(), w0.end(), s.begin() + n);
  p.ops->d_plus->apply(v0, std::span<double>(s).subspan(2 * n, n));
  p.ops->d_plus->apply(w0, std::span<double>(s).subspan(3 * n, n));
  return s;
}

EllipsoidScaling ellipsoid_scaling(double q, double p, double tau, double c) {
  if (!(c > 0.0)) throw ProjectionFailure("ellipsoid projection needs a positive target mass");
  const double denom = q + p * tau * tau * tau;
  if (!(denom > 0.0) || !(q > 0.0)) throw ProjectionFailure("ellipsoid projection of a zero state");
  const double disc = -p * q * (tau - 1.0) * (tau - 1.0) * tau + c * denom;
  if (!(disc >= 0.0) || !std::isfinite(disc))
    throw ProjectionFailure("target mass not reachable along the ellipsoid normal");
  const double root = std::sqrt(disc);
  EllipsoidScaling a;
  a.alpha1 = (p * (tau - 1.0) * tau * tau + root) / denom;
  a.alpha2 = (q * (1.0 - tau) + tau * root) / denom;
  return a;
}

Vector project_mass_ellipsoid(const HypParams& p, std::span<const double> s, double target_mass) {
  check_state(p, s, "project_mass_ellipsoid");
  const std::size_t n = p.n();
  const Parts q = split(s, n);
  const auto& m = p.ops->mass_diag;
  const double qq = kernels::weighted_dot(m, q.v, q.v) + kernels::weighted_dot(m, q.w, q.w);
  const double pp = kernels::weighted_dot(m, q.nu, q.nu) + kernels::weighted_dot(m, q.om, q.om);
  const EllipsoidScaling a = ellipsoid_scaling(qq, pp, p.tau, target_mass);
  Vector out(s.begin(), s.end());
  for (std::size_t i = 0; i < 2 * n; ++i) out[i] *= a.alpha1;
  for (std::size_t i = 2 * n; i < 4 * n; ++i) out[i] *= a.alpha2;
  return out;
}

SplitOde make_hyp_ode(const HypParams& p) {
  auto solver = std::make_shared<HypImplicitSolver>(p);
  SplitOde ode;
  ode.dimension = 4 * p.n();
  ode.full_rhs = [p](std::span<const double> u, std::span<double> out) { hyp_rhs(p, u, out); };
  ode.linear_rhs = [p](std::span<const double> u, std::span<double> out) {
    hyp_rhs_linear(p, u, out);
  };
  ode.nonlinear_rhs = [p](std::span<const double> u, std::span<double> out) {
    hyp_rhs_nonlinear(p, u, out);
  };
  ode.implicit_solve = [solver](double c, std::span<const double> rhs, std::span<double> out) {
    solver->solve(c, rhs, out);
  };
  return ode;
}

}  // namespace sbpnls
