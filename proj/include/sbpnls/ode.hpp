#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sbpnls {

using Vector = std::vector<double>;

// Right-hand side of a split ODE u' = L u + N(u). All callbacks write into
// `out`, which never aliases the input.
using RhsFn = std::function<void(std::span<const double> u, std::span<double> out)>;

// Solves u - coeff * L u = rhs for u.
using ImplicitSolveFn =
    std::function<void(double coeff, std::span<const double> rhs, std::span<double> out)>;

struct SplitOde {
  std::size_t dimension = 0;
  RhsFn full_rhs;
  RhsFn linear_rhs;
  RhsFn nonlinear_rhs;
  ImplicitSolveFn implicit_solve;
};

}  // namespace sbpnls
