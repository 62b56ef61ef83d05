#include "sbpnls/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "sbpnls/errors.hpp"

namespace sbpnls {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(p));
}
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("FftPlan: empty transform");
  const int len = static_cast<int>(n);
  std::vector<double> rbuf(n);
  std::vector<std::complex<double>> cbuf(n), cbuf2(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  r2c_ = fftw_plan_dft_r2c_1d(len, rbuf.data(), as_fftw(cbuf.data()), flags);
  c2r_ = fftw_plan_dft_c2r_1d(len, as_fftw(cbuf.data()), rbuf.data(), flags);
  fwd_ = fftw_plan_dft_1d(len, as_fftw(cbuf.data()), as_fftw(cbuf2.data()), FFTW_FORWARD, flags);
  bwd_ = fftw_plan_dft_1d(len, as_fftw(cbuf.data()), as_fftw(cbuf2.data()), FFTW_BACKWARD, flags);
  if (!r2c_ || !c2r_ || !fwd_ || !bwd_) throw NumericFailure("FftPlan: FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  for (void* p : {r2c_, c2r_, fwd_, bwd_})
    if (p) fftw_destroy_plan(static_cast<fftw_plan>(p));
}

void FftPlan::forward_real(std::span<const double> in, std::span<std::complex<double>> out) const {
  fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_), const_cast<double*>(in.data()),
                       as_fftw(out.data()));
}

void FftPlan::backward_real(std::span<std::complex<double>> in, std::span<double> out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_), as_fftw(in.data()), out.data());
}

void FftPlan::forward(std::span<const std::complex<double>> in,
                      std::span<std::complex<double>> out) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(in.data()), as_fftw(out.data()));
}

void FftPlan::backward(std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out) const {
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), as_fftw(in.data()), as_fftw(out.data()));
}

}  // namespace sbpnls
