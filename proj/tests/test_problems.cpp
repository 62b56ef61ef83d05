#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "sbpnls/errors.hpp"
#include "sbpnls/nls.hpp"
#include "sbpnls/problems.hpp"
#include "test_util.hpp"

using namespace sbpnls;
using testutil::max_abs;
using testutil::max_abs_diff;

namespace {

// Fourth-order central difference of a trajectory in time.
Vector time_derivative(const TrajectoryFn& u, const Grid& g, double t, double h) {
  const Vector a = u(g, t - 2 * h), b = u(g, t - h), c = u(g, t + h), d = u(g, t + 2 * h);
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] - 8 * b[i] + 8 * c[i] - d[i]) / (12 * h);
  return out;
}

}  // namespace

TEST_CASE("one soliton") {
  const Grid g = Grid::make_periodic(1024, -40.0, 40.0);
  const Vector s = one_soliton(g, 0.0);
  CHECK(s[512] == doctest::Approx(1.0));  // x = 0
  CHECK(s[1024 + 512] == doctest::Approx(0.0));
  const Vector s2 = one_soliton(g, 0.7);
  for (std::size_t i = 0; i < 1024; i += 37)
    CHECK(std::hypot(s2[i], s2[1024 + i]) == doctest::Approx(1.0 / std::cosh(g.nodes[i] + 2.8)));
  const NlsParams p = make_nls_params(2.0, make_fourier(1024, -40.0, 40.0));
  CHECK(max_abs_diff(nls_rhs(p, s2), time_derivative(one_soliton, g, 0.7, 1e-3)) <= 1e-8);
}

TEST_CASE("bound states") {
  const NlsParams p = make_nls_params(2.0, make_fourier(1024, -35.0, 35.0));
  const Grid& g = p.ops->grid;
  const Vector two = bound_state_soliton(2, g), three = bound_state_soliton(3, g);
  CHECK(two[512] == doctest::Approx(2.0));
  CHECK(two[1024 + 512] == 0.0);
  CHECK(std::abs(mass(p, two) - 8.0) <= 1e-8);
  CHECK(std::abs(mass(p, three) - 18.0) <= 1e-8);
  CHECK_THROWS_AS(bound_state_soliton(4, g), InvalidArgument);
}

TEST_CASE("closed-form two-soliton solves the semidiscrete equation to spatial accuracy") {
  const NlsParams p = make_nls_params(2.0, make_fourier(1024, -35.0, 35.0));
  const Grid& g = p.ops->grid;
  CHECK(max_abs_diff(two_soliton(g, 0.0), bound_state_soliton(2, g)) <= 1e-12);
  for (double t : {0.1, 0.55, 1.3}) {
    const Vector u = two_soliton(g, t);
    CHECK(max_abs_diff(nls_rhs(p, u), time_derivative(two_soliton, g, t, 1e-4)) <= 1e-6);
  }
  // |u| is periodic with period pi/4
  CHECK(std::abs(mass(p, two_soliton(g, 0.9)) - 8.0) <= 1e-8);
  const Vector a = two_soliton(g, 0.2), b = two_soliton(g, 0.2 + std::numbers::pi / 4);
  for (std::size_t i = 0; i < 1024; i += 11)
    CHECK(std::hypot(a[i], a[1024 + i]) == doctest::Approx(std::hypot(b[i], b[1024 + i])).epsilon(1e-12));
}

TEST_CASE("gray soliton") {
  const GraySoliton gray;
  CHECK(gray.x_right() == doctest::Approx(33.9412).epsilon(0.01 / 33.9412));
  CHECK(std::abs(gray.x_right() - 33.941200636950114) <= 1e-9);
  CHECK(gray.winding() == 7);
  CHECK(gray.density(0.0) == doctest::Approx(1.0));
  CHECK(gray.density(-25.0) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(gray.density(25.0) == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(gray.velocity(25.0) == doctest::Approx((2.0 - 1.0) / std::numbers::sqrt2).epsilon(1e-10));
  CHECK(gray.phase(gray.x_right()) == doctest::Approx(7 * 2 * std::numbers::pi).epsilon(1e-13));

  const NlsParams p = make_nls_params(-1.0, make_fourier(512, gray.x_left(), gray.x_right()));
  const Grid& g = p.ops->grid;
  const TrajectoryFn u = [&](const Grid& gg, double t) { return gray.sample(gg, t); };
  for (double t : {0.0, 0.8}) {
    const Vector s = gray.sample(g, t);
    CHECK(max_abs_diff(nls_rhs(p, s), time_derivative(u, g, t, 1e-3)) <= 1e-7);
  }
  // periodicity of the sampled profile: one period of translation is the identity
  const double period = (gray.x_right() - gray.x_left()) / gray.speed();
  CHECK(max_abs_diff(gray.sample(g, period), gray.sample(g, 0.0)) <= 1e-10);
  CHECK_THROWS_AS(GraySoliton(1.0, 1.5, 2.0), InvalidArgument);
  const ProblemSpec spec = problem_by_name("gray_soliton");
  CHECK(spec.x_right == gray.x_right());
  CHECK(spec.beta == -1.0);
}

TEST_CASE("dispersive shock data") {
  const Grid g = Grid::make_periodic(8, -2.0, 2.0);  // nodes -2, -1.5, ..., 1.5
  const Vector s = dispersive_shock(g);
  CHECK(s[4] * s[4] == doctest::Approx(1.5));
  CHECK(std::abs(s[2] * s[2] - 2.0) <= 1e-8);
  CHECK(std::abs(s[6] * s[6] - 1.0) <= 1e-8);
  for (std::size_t i = 8; i < 16; ++i) CHECK(s[i] == 0.0);
}

TEST_CASE("hydrodynamic post-processing") {
  const OperatorSet ops = make_fourier(256, 0.0, 4 * std::numbers::pi);
  const Grid& g = ops.grid;
  {
    Vector s(512);
    for (std::size_t i = 0; i < 256; ++i) {
      s[i] = std::cos(2 * g.nodes[i]);
      s[256 + i] = std::sin(2 * g.nodes[i]);
    }
    const HydroFields h = to_hydro(s, ops);
    for (std::size_t i = 0; i < 256; ++i) {
      CHECK(h.vel[i] == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(h.theta[i] - 2 * g.nodes[i] == doctest::Approx(h.theta[0]).epsilon(1e-10));
      CHECK(h.rho[i] == doctest::Approx(1.0));
    }
    for (std::size_t i = 1; i < 256; ++i) CHECK(h.theta[i] > h.theta[i - 1]);
  }
  {
    Vector s(512, 0.0);
    for (std::size_t i = 0; i < 256; ++i) s[i] = 1.0 + 0.5 * std::sin(g.nodes[i]);
    const HydroFields h = to_hydro(s, ops);
    CHECK(max_abs(h.theta) == 0.0);
    CHECK(max_abs(h.vel) <= 1e-12);
  }
  {
    // winding phase theta = x + 0.3 sin x over several turns, rho = 2 + cos x
    Vector s(512);
    for (std::size_t i = 0; i < 256; ++i) {
      const double x = g.nodes[i], th = 3 * x + 0.3 * std::sin(x), r = std::sqrt(2 + std::cos(x));
      s[i] = r * std::cos(th);
      s[256 + i] = r * std::sin(th);
    }
    const HydroFields h = to_hydro(s, ops);
    for (std::size_t i = 0; i < 256; ++i) {
      const double x = g.nodes[i];
      CHECK(h.theta[i] == doctest::Approx(3 * x + 0.3 * std::sin(x)).epsilon(1e-12).scale(1.0));
      CHECK(h.vel[i] == doctest::Approx(3 + 0.3 * std::cos(x)).epsilon(1e-9));
      CHECK(h.rho[i] == doctest::Approx(2 + std::cos(x)));
    }
  }
  {
    // a vacuum node is flagged and takes a neighbouring phase
    Vector s(512, 0.0);
    for (std::size_t i = 0; i < 256; ++i) s[256 + i] = 1.0;
    s[256 + 10] = 0.0;
    const HydroFields h = to_hydro(s, ops);
    CHECK_FALSE(h.valid[10]);
    CHECK(h.valid[11]);
    CHECK(h.theta[10] == doctest::Approx(std::numbers::pi / 2));
  }
}

TEST_CASE("error norms") {
  std::mt19937_64 rng(3);
  const OperatorSet ops = make_bounded_fd_sbp(4, 40, 0.0, 3.0);
  const Vector a = testutil::random_vector(80, rng), b = testutil::random_vector(80, rng),
               c = testutil::random_vector(80, rng);
  CHECK(l2_error(ops, a, a) == 0.0);
  Vector shifted = a;
  for (std::size_t i = 0; i < 40; ++i) shifted[i] += 0.25;
  CHECK(l2_error(ops, a, shifted) == doctest::Approx(0.25 * std::sqrt(3.0)).epsilon(1e-13));
  CHECK(l2_error(ops, a, c) <= l2_error(ops, a, b) + l2_error(ops, b, c) + 1e-15);
  CHECK_THROWS_AS(l2_error(ops, a, Vector(78)), InvalidArgument);
  CHECK(density_l2_error(ops, a, a) == 0.0);
}

TEST_CASE("growth fit") {
  std::vector<double> t, lin, quad, noisy;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  for (int k = 1; k <= 20; ++k) {
    t.push_back(k);
    lin.push_back(3e-7 * k);
    quad.push_back(2e-5 * k * k);
    noisy.push_back(std::pow(k, 1.5) * (1 + jitter(rng)));
  }
  CHECK(growth_fit(t, lin) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(growth_fit(t, quad) == doctest::Approx(2.0).epsilon(1e-10));
  const double s = growth_fit(t, noisy);
  CHECK(s >= 1.4);
  CHECK(s <= 1.6);
  CHECK(growth_fit(t, quad, 5.0) == doctest::Approx(2.0).epsilon(1e-10));
  CHECK_THROWS_AS(growth_fit(t, std::vector<double>(20, 0.0)), FitFailure);
  CHECK_THROWS_AS(growth_fit(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}), FitFailure);
  CHECK_THROWS_AS(growth_fit(std::vector<double>(6, 2.0), std::vector<double>(6, 1.0)), FitFailure);
}

TEST_CASE("problem registry") {
  for (const auto& name : problem_names()) {
    const ProblemSpec p = problem_by_name(name);
    CHECK(p.name == name);
    const Grid g = Grid::make_periodic(128, p.x_left, p.x_right);
    const Vector u0 = p.initial_state(g);
    CHECK(u0.size() == 256);
    if (p.has_exact()) CHECK(max_abs_diff(p.exact_solution(g, 0.0), u0) <= 1e-12);
  }
  CHECK_FALSE(problem_by_name("three_soliton").has_exact());
  CHECK_THROWS_AS(problem_by_name("kdv"), InvalidArgument);
}
