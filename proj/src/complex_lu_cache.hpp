#pragma once

// Sparse LU factorizations of complex stage matrices, cached by the exact
// stage coefficient. Lookups are serialized; factorizations are immutable once
// published and may be used for solves concurrently.

#include <Eigen/SparseLU>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "sbpnls/errors.hpp"

namespace sbpnls::detail {

using ComplexSparse = Eigen::SparseMatrix<std::complex<double>, Eigen::ColMajor, int>;
using ComplexLu = Eigen::SparseLU<ComplexSparse, Eigen::COLAMDOrdering<int>>;
using ComplexVector = Eigen::VectorXcd;

class ComplexLuCache {
 public:
  // Beyond this many distinct coefficients the cache starts over.
  static constexpr std::size_t kMaxEntries = 64;

  std::shared_ptr<const ComplexLu> get(double coeff,
                                       const std::function<ComplexSparse(double)>& build) {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(coeff); it != cache_.end()) return it->second;
    if (cache_.size() >= kMaxEntries) cache_.clear();
    auto lu = std::make_shared<ComplexLu>();
    ComplexSparse a = build(coeff);
    a.makeCompressed();
    lu->compute(a);
    if (lu->info() != Eigen::Success)
      throw NumericFailure("sparse LU factorization of the stage matrix failed");
    ++factorizations_;
    cache_.emplace(coeff, lu);
    return lu;
  }

  std::size_t factorizations() const {
    std::lock_guard lock(mutex_);
    return factorizations_;
  }

 private:
  mutable std::mutex mutex_;
  std::map<double, std::shared_ptr<const ComplexLu>> cache_;
  std::size_t factorizations_ = 0;
};

}  // namespace sbpnls::detail
