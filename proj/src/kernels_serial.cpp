#include "sbpnls/kernels.hpp"

namespace sbpnls::kernels::serial {

void csr_apply(const CsrView& a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) acc += a.val[k] * x[a.col[k]];
    y[i] = acc;
  }
}

double weighted_dot(std::span<const double> m, std::span<const double> a,
                    std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) acc += m[i] * a[i] * b[i];
  return acc;
}

double weighted_quartic(std::span<const double> m, std::span<const double> v,
                        std::span<const double> w) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double rho = v[i] * v[i] + w[i] * w[i];
    acc += m[i] * rho * rho;
  }
  return acc;
}

void cubic_term(double beta, std::span<const double> v, std::span<const double> w,
                std::span<double> out_v, std::span<double> out_w) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double rho = beta * (v[i] * v[i] + w[i] * w[i]);
    const double vi = v[i];
    out_v[i] = -rho * w[i];
    out_w[i] = rho * vi;
  }
}

void combine(std::span<double> out, std::span<const double> base, double scale,
             std::span<const double> coeffs, std::span<const double* const> terms) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j)
      if (coeffs[j] != 0.0) acc += coeffs[j] * terms[j][i];
    out[i] = base[i] + scale * acc;
  }
}

}  // namespace sbpnls::kernels::serial
