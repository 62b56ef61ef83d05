#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sbpnls {

using Matrix = std::vector<std::vector<double>>;

// Paired Butcher coefficients of an additive Runge-Kutta method. The
// explicit part acts on the nonlinear terms and the (diagonally) implicit part
// on the linear terms. Purely explicit methods have an all-zero implicit part
// and are stepped with the full right-hand side.
struct ImexTableau {
  std::string name;
  int stages = 0;
  int order = 0;
  Matrix a_explicit;
  Matrix a_implicit;
  std::vector<double> b_explicit;
  std::vector<double> b_implicit;
  std::vector<double> c_explicit;
  std::vector<double> c_implicit;

  bool is_explicit() const;
  // Both weight vectors equal the last rows of their coefficient matrices, so
  // the final stage value is the step result.
  bool stiffly_accurate() const;
  double gamma() const;  // largest diagonal implicit coefficient
};

struct TableauDefects {
  double row_sums = 0.0;         // |sum_j a_ij - c_i|
  double order_conditions = 0.0;  // worst order-condition defect up to min(order, 3)
  double coupling = 0.0;          // worst cross-part condition defect
};

TableauDefects tableau_defects(const ImexTableau& t);

// Throws InvalidArgument when the structure is malformed or any defect
// exceeds `tol`.
void validate_tableau(const ImexTableau& t, double tol = 1e-12);

// Registry: "rk4", "heun", "ars343", "kc43", "kc54". Entries are validated on
// first access.
const ImexTableau& tableau_by_name(std::string_view name);
std::vector<std::string> tableau_names();

}  // namespace sbpnls
