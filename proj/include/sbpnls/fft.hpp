#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace sbpnls {

// Owns FFTW plans for one transform length. Planning happens once, under a
// process-wide lock; execution uses FFTW's new-array interface and is safe to
// call concurrently from several threads. Transforms are unnormalized.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t half_size() const noexcept { return n_ / 2 + 1; }

  // in: n reals -> out: n/2 + 1 coefficients
  void forward_real(std::span<const double> in, std::span<std::complex<double>> out) const;
  // in: n/2 + 1 coefficients (overwritten) -> out: n reals
  void backward_real(std::span<std::complex<double>> in, std::span<double> out) const;
  void forward(std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out) const;
  void backward(std::span<const std::complex<double>> in,
                std::span<std::complex<double>> out) const;

 private:
  std::size_t n_;
  void* r2c_ = nullptr;
  void* c2r_ = nullptr;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

}  // namespace sbpnls
