#include <omp.h>

#include <atomic>

#include "sbpnls/kernels.hpp"

namespace sbpnls::kernels {

namespace omp {

void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y) {
  const auto rows = static_cast<std::ptrdiff_t>(a.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) acc += a.val[k] * x[a.col[k]];
    y[i] = acc;
  }
}

double weighted_dot(std::span<const double> m, std::span<const double> a,
                    std::span<const double> b) {
  const auto n = static_cast<std::ptrdiff_t>(m.size());
  double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (std::ptrdiff_t i = 0; i < n; ++i) acc += m[i] * a[i] * b[i];
  return acc;
}

double weighted_quartic(std::span<const double> m, std::span<const double> v,
                        std::span<const double> w) {
  const auto n = static_cast<std::ptrdiff_t>(m.size());
  double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double rho = v[i] * v[i] + w[i] * w[i];
    acc += m[i] * rho * rho;
  }
  return acc;
}

void cubic_term(double beta, std::span<const double> v, std::span<const double> w,
                std::span<double> out_v, std::span<double> out_w) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double rho = beta * (v[i] * v[i] + w[i] * w[i]);
    const double vi = v[i];
    out_v[i] = -rho * w[i];
    out_w[i] = rho * vi;
  }
}

void combine(std::span<double> out, std::span<const double> base, double scale,
             std::span<const double> coeffs, std::span<const double* const> terms) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  const std::size_t nterms = coeffs.size();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < nterms; ++j)
      if (coeffs[j] != 0.0) acc += coeffs[j] * terms[j][i];
    out[i] = base[i] + scale * acc;
  }
}

}  // namespace omp

namespace {
std::atomic<int> g_threads{1};

bool parallel(std::size_t n) {
  return g_threads.load(std::memory_order_relaxed) > 1 && n >= kParallelThreshold;
}
}  // namespace

void set_num_threads(int threads) {
  g_threads.store(threads < 1 ? 1 : threads, std::memory_order_relaxed);
  omp_set_num_threads(threads < 1 ? 1 : threads);
}

int num_threads() { return g_threads.load(std::memory_order_relaxed); }

void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y) {
  parallel(a.rows) ? omp::csr_apply(a, x, y) : serial::csr_apply(a, x, y);
}

double weighted_dot(std::span<const double> m, std::span<const double> a,
                    std::span<const double> b) {
  return parallel(m.size()) ? omp::weighted_dot(m, a, b) : serial::weighted_dot(m, a, b);
}

double weighted_quartic(std::span<const double> m, std::span<const double> v,
                        std::span<const double> w) {
  return parallel(m.size()) ? omp::weighted_quartic(m, v, w)
                            : serial::weighted_quartic(m, v, w);
}

void cubic_term(double beta, std::span<const double> v, std::span<const double> w,
                std::span<double> out_v, std::span<double> out_w) {
  parallel(v.size()) ? omp::cubic_term(beta, v, w, out_v, out_w)
                     : serial::cubic_term(beta, v, w, out_v, out_w);
}

void combine(std::span<double> out, std::span<const double> base, double scale,
             std::span<const double> coeffs, std::span<const double* const> terms) {
  parallel(out.size()) ? omp::combine(out, base, scale, coeffs, terms)
                       : serial::combine(out, base, scale, coeffs, terms);
}

}  // namespace sbpnls::kernels
