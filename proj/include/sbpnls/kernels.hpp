#pragma once

// Data-parallel inner loops used by the semidiscretizations and the time
// integrators. Every kernel has a serial reference in kernels::serial and an
// OpenMP version in kernels::omp with identical semantics. The unqualified
// entry points in kernels:: dispatch on the configured thread count and the
// problem size; with one thread they always take the serial path, which keeps
// single-threaded runs bit-reproducible.

#include <cstddef>
#include <span>

namespace sbpnls::kernels {

// Non-owning view of a row-major CSR matrix (Eigen's compressed storage).
struct CsrView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  const int* row_ptr = nullptr;
  const int* col = nullptr;
  const double* val = nullptr;
};

namespace serial {
void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y);
double weighted_dot(std::span<const double> m, std::span<const double> a,
                    std::span<const double> b);
double weighted_quartic(std::span<const double> m, std::span<const double> v,
                        std::span<const double> w);
void cubic_term(double beta, std::span<const double> v, std::span<const double> w,
                std::span<double> out_v, std::span<double> out_w);
void combine(std::span<double> out, std::span<const double> base, double scale,
             std::span<const double> coeffs, std::span<const double* const> terms);
}  // namespace serial

namespace omp {
void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y);
double weighted_dot(std::span<const double> m, std::span<const double> a,
                    std::span<const double> b);
double weighted_quartic(std::span<const double> m, std::span<const double> v,
                        std::span<const double> w);
void cubic_term(double beta, std::span<const double> v, std::span<const double> w,
                std::span<double> out_v, std::span<double> out_w);
void combine(std::span<double> out, std::span<const double> base, double scale,
             std::span<const double> coeffs, std::span<const double* const> terms);
}  // namespace omp

// Vectors shorter than this always use the serial path.
inline constexpr std::size_t kParallelThreshold = 4096;

void set_num_threads(int threads);
int num_threads();

void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y);

// sum_i m_i a_i b_i
double weighted_dot(std::span<const double> m, std::span<const double> a,
                    std::span<const double> b);

// sum_i m_i (v_i^2 + w_i^2)^2
double weighted_quartic(std::span<const double> m, std::span<const double> v,
                        std::span<const double> w);

// out_v = -beta (v^2 + w^2) w,  out_w = beta (v^2 + w^2) v
void cubic_term(double beta, std::span<const double> v, std::span<const double> w,
                std::span<double> out_v, std::span<double> out_w);

// out = base + scale * sum_j coeffs[j] * terms[j]; zero coefficients are skipped.
// out may alias base.
void combine(std::span<double> out, std::span<const double> base, double scale,
             std::span<const double> coeffs, std::span<const double* const> terms);

}  // namespace sbpnls::kernels
