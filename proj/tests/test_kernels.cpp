#include <doctest.h>

#include <cmath>
#include <random>

#include "sbpnls/kernels.hpp"
#include "sbpnls/nls.hpp"
#include "sbpnls/operators.hpp"
#include "test_util.hpp"

using namespace sbpnls;
namespace k = sbpnls::kernels;

namespace {

k::CsrView view(const SparseMatrix& a) {
  return {static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()), a.outerIndexPtr(),
          a.innerIndexPtr(), a.valuePtr()};
}

struct ThreadGuard {
  explicit ThreadGuard(int t) { k::set_num_threads(t); }
  ~ThreadGuard() { k::set_num_threads(1); }
};

}  // namespace

TEST_CASE("OpenMP kernels agree with the serial reference") {
  std::mt19937_64 rng(17);
  for (int threads : {1, 3}) {
    ThreadGuard guard(threads);
    for (std::size_t n : {1u, 7u, 5000u, 20011u}) {
      const auto m = testutil::random_vector(n, rng), a = testutil::random_vector(n, rng),
                 b = testutil::random_vector(n, rng);
      const double dot_s = k::serial::weighted_dot(m, a, b), dot_p = k::omp::weighted_dot(m, a, b);
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(m[i] * a[i] * b[i]);
      CHECK(std::abs(dot_s - dot_p) <= 1e-14 * scale);
      const double q_s = k::serial::weighted_quartic(m, a, b), q_p = k::omp::weighted_quartic(m, a, b);
      CHECK(std::abs(q_s - q_p) <= 1e-14 * std::abs(q_s) * 10 + 1e-300);

      std::vector<double> vs(n), ws(n), vp(n), wp(n);
      k::serial::cubic_term(1.5, a, b, vs, ws);
      k::omp::cubic_term(1.5, a, b, vp, wp);
      CHECK(vs == vp);
      CHECK(ws == wp);

      const std::vector<double> coeffs{0.5, 0.0, -2.0};
      const std::vector<const double*> terms{a.data(), b.data(), m.data()};
      std::vector<double> cs(n), cp(n);
      k::serial::combine(cs, m, 0.1, coeffs, terms);
      k::omp::combine(cp, m, 0.1, coeffs, terms);
      CHECK(cs == cp);
    }
    for (std::size_t n : {40u, 9001u}) {
      const OperatorSet ops = make_central_fd(6, n, 0.0, 1.0);
      const auto x = testutil::random_vector(n, rng);
      std::vector<double> ys(n), yp(n);
      k::serial::csr_apply(view(*ops.d2->sparse()), x, ys);
      k::omp::csr_apply(view(*ops.d2->sparse()), x, yp);
      CHECK(ys == yp);
    }
  }
}

TEST_CASE("combine allows out to alias base") {
  std::vector<double> u{1, 2, 3}, t{1, 1, 1};
  const std::vector<double> coeffs{2.0};
  const std::vector<const double*> terms{t.data()};
  k::serial::combine(u, u, 0.5, coeffs, terms);
  CHECK(u == std::vector<double>{2, 3, 4});
  k::omp::combine(u, u, 0.5, coeffs, terms);
  CHECK(u == std::vector<double>{3, 4, 5});
}

TEST_CASE("threaded right-hand side matches the single-threaded one") {
  std::mt19937_64 rng(23);
  const auto p = make_nls_params(2.0, make_central_fd(4, 6000, -35.0, 35.0));
  const auto s = testutil::random_vector(2 * p.n(), rng);
  const Vector serial = nls_rhs(p, s);
  ThreadGuard guard(4);
  const Vector threaded = nls_rhs(p, s);
  CHECK(testutil::max_abs_diff(serial, threaded) == 0.0);
  CHECK(k::num_threads() == 4);
}
