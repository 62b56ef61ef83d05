#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "sbpnls/errors.hpp"
#include "sbpnls/hyperbolic.hpp"
#include "sbpnls/nls.hpp"
#include "test_util.hpp"

using namespace sbpnls;
using testutil::max_abs;
using testutil::max_abs_diff;

namespace {

Eigen::MatrixXd dense_linear_block(const HypParams& p) {
  const Eigen::Index n = static_cast<Eigen::Index>(p.n());
  const Eigen::MatrixXd dp = p.ops->d_plus->dense(), dm = p.ops->d_minus->dense();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  l.block(0, 3 * n, n, n) = -dm;
  l.block(n, 2 * n, n, n) = dm;
  l.block(2 * n, n, n, n) = dp / p.tau;
  l.block(2 * n, 3 * n, n, n) = -id / p.tau;
  l.block(3 * n, 0, n, n) = -dp / p.tau;
  l.block(3 * n, 2 * n, n, n) = id / p.tau;
  return l;
}

Vector sech_state(const HypParams& p, double amp) {
  const std::size_t n = p.n();
  Vector v(n), w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i] = amp / std::cosh(p.ops->grid.nodes[i]);
  return well_prepared_init(p, v, w);
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_hyp_params(1.0, 0.0, make_upwind_fd(2, 20, 0.0, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(make_hyp_params(1.0, 1e-2, make_central_fd(2, 20, 0.0, 1.0)), InvalidArgument);
  const HypParams p = make_hyp_params(1.0, 1e-2, make_upwind_fd(2, 20, 0.0, 1.0));
  CHECK_THROWS_AS(hyp_rhs(p, Vector(79, 0.0)), InvalidArgument);
}

TEST_CASE("rhs trivial cases and split consistency") {
  std::mt19937_64 rng(1);
  const HypParams p = make_hyp_params(2.0, 0.3, make_upwind_fd(4, 24, -3.0, 3.0));
  const std::size_t n = p.n();
  CHECK(max_abs(hyp_rhs(p, Vector(4 * n, 0.0))) == 0.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector s = testutil::random_vector(4 * n, rng);
    Vector lin(4 * n), non(4 * n);
    hyp_rhs_linear(p, s, lin);
    hyp_rhs_nonlinear(p, s, non);
    const Vector full = hyp_rhs(p, s);
    for (std::size_t i = 0; i < 4 * n; ++i)
      CHECK(std::abs(lin[i] + non[i] - full[i]) <= 1e-14 * max_abs(full));
    const Eigen::VectorXd expect = dense_linear_block(p) * Eigen::Map<const Eigen::VectorXd>(s.data(), 4 * n);
    for (std::size_t i = 0; i < 4 * n; ++i) CHECK(std::abs(lin[i] - expect[i]) <= 1e-12 * expect.cwiseAbs().maxCoeff());
  }
  // v = w = 0: pure rotation of (nu, omega).
  Vector s(4 * n, 0.0);
  for (std::size_t i = 2 * n; i < 4 * n; ++i) s[i] = std::sin(double(i));
  const Vector f = hyp_rhs(p, s);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(f[2 * n + i] == doctest::Approx(-s[3 * n + i] / p.tau));
    CHECK(f[3 * n + i] == doctest::Approx(s[2 * n + i] / p.tau));
  }
  const HypParams p0 = make_hyp_params(0.0, 0.3, make_upwind_fd(4, 24, -3.0, 3.0));
  Vector non(4 * n);
  hyp_rhs_nonlinear(p0, testutil::random_vector(4 * n, rng), non);
  CHECK(max_abs(non) == 0.0);
}

TEST_CASE("well-prepared data reproduce the NLS right-hand side with D2 = D- D+") {
  std::mt19937_64 rng(2);
  for (int order : {2, 4, 6}) {
    OperatorSet ops = make_upwind_fd(order, 40, -4.0, 4.0);
    const HypParams hp = make_hyp_params(1.5, 1e-4, ops);
    const NlsParams np = make_nls_params(1.5, ops);
    const Vector v = testutil::random_vector(40, rng), w = testutil::random_vector(40, rng);
    const Vector hs = well_prepared_init(hp, v, w);
    const Vector hf = hyp_rhs(hp, hs);
    const Vector nf = nls_rhs(np, make_state(v, w));
    CHECK(max_abs_diff(std::span<const double>(hf).first(80), nf) <= 1e-12 * max_abs(nf));
    // preparing again leaves the auxiliary variables unchanged
    CHECK(well_prepared_init(hp, std::span<const double>(hs).first(40), std::span<const double>(hs).subspan(40, 40)) == hs);
  }
  const HypParams p = make_hyp_params(1.0, 1.0, make_upwind_fd(2, 20, 0.0, 1.0));
  const Vector s = well_prepared_init(p, Vector(20, 1.0), Vector(20, 1.0));
  CHECK(max_abs(std::span<const double>(s).subspan(40)) <= 1e-12);
  CHECK_THROWS_AS(well_prepared_init(p, Vector(19, 1.0), Vector(20, 1.0)), InvalidArgument);
}

TEST_CASE("implicit stage solve") {
  std::mt19937_64 rng(3);
  for (double tau : {1.0, 1e-4}) {
    const HypParams p = make_hyp_params(1.0, tau, make_upwind_fd(6, 16, -2.0, 2.0));
    const std::size_t n = 4 * p.n();
    HypImplicitSolver solver(p);
    const Eigen::MatrixXd l = dense_linear_block(p);
    const Vector rhs = testutil::random_vector(n, rng);
    Vector out(n);
    solver.solve(0.0, rhs, out);
    CHECK(out == rhs);
    for (double c : {1e-2, 0.5, -0.1}) {
      solver.solve(c, rhs, out);
      const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - c * l;
      const Eigen::VectorXd x = a.partialPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), n));
      const Eigen::Map<const Eigen::VectorXd> got(out.data(), n);
      CHECK((got - x).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff()));
    }
  }
  const HypParams p = make_hyp_params(1.0, 1e-4, make_upwind_fd(6, 256, -35.0, 35.0));
  HypImplicitSolver solver(p);
  const Vector rhs = testutil::random_vector(1024, rng);
  Vector out(1024), lout(1024);
  solver.solve(1e-2, rhs, out);
  hyp_rhs_linear(p, out, lout);
  double res = 0.0, nr = 0.0;
  for (std::size_t i = 0; i < 1024; ++i) {
    res += std::pow(out[i] - 1e-2 * lout[i] - rhs[i], 2);
    nr += rhs[i] * rhs[i];
  }
  CHECK(std::sqrt(res / nr) <= 1e-12);
}

TEST_CASE("mass and energy functionals") {
  const HypParams p = make_hyp_params(1.0, 1.0, make_upwind_fd(2, 20, 0.0, 2.0));
  Vector s(80, 0.0);
  std::fill(s.begin(), s.begin() + 20, 1.0);
  CHECK(hyp_mass(p, s) == doctest::Approx(2.0));
  std::fill(s.begin(), s.end(), 1.0);
  CHECK(hyp_mass(p, s) == doctest::Approx(8.0));
  CHECK(hyp_energy(p, Vector(80, 0.0)) == 0.0);

  std::mt19937_64 rng(4);
  Vector aux(80, 0.0);
  for (std::size_t i = 40; i < 80; ++i) aux[i] = std::sin(3.0 * i);
  double mq = 0.0;
  for (std::size_t i = 40; i < 80; ++i) mq += p.ops->mass_diag[i % 20] * aux[i] * aux[i];
  CHECK(hyp_energy(p, aux) == doctest::Approx(-mq));

  const HypParams q = make_hyp_params(-1.2, 1e-3, make_upwind_fd(4, 40, -4.0, 4.0));
  const Vector v = testutil::random_vector(40, rng), w = testutil::random_vector(40, rng);
  const Vector hs = well_prepared_init(q, v, w);
  const auto dv = (*q.ops->d_plus)(v), dw = (*q.ops->d_plus)(w);
  double expect = 0.0;
  for (std::size_t i = 0; i < 40; ++i) {
    const double m = q.ops->mass_diag[i], rho = v[i] * v[i] + w[i] * w[i];
    expect += m * (dv[i] * dv[i] + dw[i] * dw[i]) + 0.6 * m * rho * rho;
  }
  CHECK(std::abs(hyp_energy(q, hs) - expect) <= 1e-12 * std::abs(expect));

  // |u|^2 + tau |u_x|^2 quadrature for 2 sech x: 8 + tau * 4 * (2/3)
  const HypParams r = make_hyp_params(2.0, 1e-4, make_upwind_fd(6, 1024, -35.0, 35.0));
  CHECK(std::abs(hyp_mass(r, sech_state(r, 2.0)) - (8.0 + 1e-4 * 8.0 / 3.0)) <= 1e-6);
}

TEST_CASE("semidiscrete conservation of mass and energy") {
  std::mt19937_64 rng(5);
  for (int order : {2, 4, 6}) {
    const HypParams p = make_hyp_params(1.7, 3e-2, make_upwind_fd(order, 30, -3.0, 3.0));
    const std::size_t n = p.n();
    const auto& m = p.ops->mass_diag;
    for (int trial = 0; trial < 5; ++trial) {
      const Vector s = testutil::random_vector(4 * n, rng);
      const Vector f = hyp_rhs(p, s);
      const std::span<const double> v(s.data(), n), w(s.data() + n, n), nu(s.data() + 2 * n, n),
          om(s.data() + 3 * n, n);
      const std::span<const double> fv(f.data(), n), fw(f.data() + n, n), fnu(f.data() + 2 * n, n),
          fom(f.data() + 3 * n, n);
      const auto dpv = (*p.ops->d_plus)(v), dpw = (*p.ops->d_plus)(w);
      const auto dpfv = (*p.ops->d_plus)(fv), dpfw = (*p.ops->d_plus)(fw);
      double dm = 0.0, de = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dm += 2 * m[i] * (v[i] * fv[i] + w[i] * fw[i] + p.tau * (nu[i] * fnu[i] + om[i] * fom[i]));
        de += 2 * m[i] * (fnu[i] * dpv[i] + nu[i] * dpfv[i] - nu[i] * fnu[i] + fom[i] * dpw[i] +
                          om[i] * dpfw[i] - om[i] * fom[i]);
        de -= 2 * p.beta * m[i] * (v[i] * v[i] + w[i] * w[i]) * (v[i] * fv[i] + w[i] * fw[i]);
        scale += m[i] * std::abs(s[i]) * max_abs(f) * max_abs(s);
      }
      CHECK(std::abs(dm) <= 1e-12 * scale);
      CHECK(std::abs(de) <= 1e-12 * scale * max_abs(s) * 100);
    }
  }
}

TEST_CASE("ellipsoid projection") {
  // tau = 1 reduces to a sphere scaling.
  const EllipsoidScaling a = ellipsoid_scaling(3.0, 1.0, 1.0, 2.0);
  CHECK(a.alpha1 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(a.alpha2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  // tau -> 0 rescales only q0.
  const EllipsoidScaling b = ellipsoid_scaling(3.0, 1.0, 1e-9, 2.0);
  CHECK(b.alpha1 == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-8));
  CHECK(b.alpha2 == doctest::Approx(1.0).epsilon(1e-8));
  // current mass as target gives exactly no change
  const EllipsoidScaling c = ellipsoid_scaling(3.0, 2.0, 0.25, 3.0 + 0.25 * 2.0);
  CHECK(c.alpha1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c.alpha2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(ellipsoid_scaling(0.0, 0.0, 0.5, 1.0), ProjectionFailure);
  CHECK_THROWS_AS(ellipsoid_scaling(1.0, 1.0, 0.5, -1.0), ProjectionFailure);

  std::mt19937_64 rng(6);
  const HypParams p = make_hyp_params(1.0, 1e-4, make_upwind_fd(4, 50, -5.0, 5.0));
  const Vector s = testutil::random_vector(200, rng);
  const double target = 0.9 * hyp_mass(p, s);
  const Vector once = project_mass_ellipsoid(p, s, target);
  CHECK(std::abs(hyp_mass(p, once) - target) <= 1e-13 * target);
  const Vector twice = project_mass_ellipsoid(p, once, target);
  CHECK(max_abs_diff(once, twice) <= 1e-14 * max_abs(once) * 10);
}
