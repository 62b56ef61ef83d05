#include "sbpnls/problems.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include "sbpnls/errors.hpp"

namespace sbpnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vector from_complex(const std::vector<std::complex<double>>& u) {
  const std::size_t n = u.size();
  Vector s(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = u[i].real();
    s[n + i] = u[i].imag();
  }
  return s;
}

double sech(double x) { return 1.0 / std::cosh(x); }

}  // namespace

Vector one_soliton(const Grid& g, double t) {
  std::vector<std::complex<double>> u(g.n_nodes);
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    const double x = g.nodes[i];
    u[i] = sech(x + 4 * t) * std::exp(std::complex<double>(0.0, -(2 * x + 3 * t)));
  }
  return from_complex(u);
}

Vector bound_state_soliton(int order_n, const Grid& g) {
  if (order_n != 2 && order_n != 3)
    throw InvalidArgument("bound_state_soliton: order must be 2 or 3, got " + std::to_string(order_n));
  Vector s(2 * g.n_nodes, 0.0);
  for (std::size_t i = 0; i < g.n_nodes; ++i) s[i] = order_n * sech(g.nodes[i]);
  return s;
}

Vector two_soliton(const Grid& g, double t) {
  std::vector<std::complex<double>> u(g.n_nodes);
  const std::complex<double> e1 = std::exp(std::complex<double>(0.0, t));
  const std::complex<double> e8 = std::exp(std::complex<double>(0.0, 8 * t));
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    const double x = g.nodes[i];
    // Divide through by cosh 4x to avoid overflow far from the core.
    const double c4 = std::cosh(4 * x);
    const double den = 1.0 + 4 * std::cosh(2 * x) / c4 + 3 * std::cos(8 * t) / c4;
    u[i] = 4.0 * e1 * (std::cosh(3 * x) / c4 + 3.0 * e8 * std::cosh(x) / c4) / den;
  }
  return from_complex(u);
}

// ---------------------------------------------------------------------------

GraySoliton::GraySoliton(double b1, double b2, double c, double x_left, double min_length)
    : b1_(b1), b2_(b2), c_(c), x_left_(x_left) {
  if (!(b1 > b2) || !(b2 > 0.0))
    throw InvalidArgument("gray soliton needs b1 > b2 > 0 for a real profile");
  const double target0 = x_left + min_length;
  const double f0 = phase(target0);
  if (!(velocity(target0) > 0.0))
    throw SetupFailure("gray soliton: background phase velocity must be positive");
  winding_ = static_cast<int>(std::ceil(f0 / kTwoPi - 1e-12));
  const double goal = kTwoPi * winding_;
  if (f0 >= goal) {
    x_right_ = target0;
    return;
  }
  // The phase grows at least at the background rate beyond the core.
  const double span = (goal - f0) / velocity(target0) + 1.0;
  auto f = [&](double x) { return phase(x) - goal; };
  std::uintmax_t iters = 200;
  try {
    const auto [a, b] = boost::math::tools::toms748_solve(
        f, target0, target0 + span, boost::math::tools::eps_tolerance<double>(50), iters);
    x_right_ = 0.5 * (a + b);
  } catch (const std::exception& e) {
    throw SetupFailure(std::string("gray soliton: periodic boundary search failed: ") + e.what());
  }
  if (iters >= 200) throw SetupFailure("gray soliton: periodic boundary search did not converge");
}

double GraySoliton::speed() const { return std::numbers::sqrt2 * c_; }

double GraySoliton::density(double x, double t) const {
  const double s = sech(std::sqrt(b1_ - b2_) * (x / std::numbers::sqrt2 - c_ * t));
  return b1_ - (b1_ - b2_) * s * s;
}

double GraySoliton::velocity(double x, double t) const {
  return (c_ - b1_ * std::sqrt(b2_) / density(x, t)) / std::numbers::sqrt2;
}

double GraySoliton::phase(double x) const {
  auto f = [this](double y) { return velocity(y); };
  double error = 0.0;
  // Split at the core so each piece is smooth on its own scale.
  double total = 0.0;
  std::vector<double> cuts{x_left_};
  for (double p : {-5.0, 0.0, 5.0})
    if (p > x_left_ && p < x) cuts.push_back(p);
  cuts.push_back(x);
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 15,
                                                                           1e-14, &error);
  return total;
}

Vector GraySoliton::sample(const Grid& g, double t) const {
  const double L = x_right_ - x_left_;
  std::vector<std::complex<double>> u(g.n_nodes);
  for (std::size_t i = 0; i < g.n_nodes; ++i) {
    // Translate and wrap back into [x_left, x_right); whole turns of the
    // phase make the profile periodic.
    double xi = g.nodes[i] - speed() * t;
    xi = x_left_ + std::fmod(std::fmod(xi - x_left_, L) + L, L);
    u[i] = std::sqrt(density(xi)) * std::exp(std::complex<double>(0.0, phase(xi)));
  }
  return from_complex(u);
}

std::vector<double> GraySoliton::sample_density(const Grid& g, double t) const {
  const Vector s = sample(g, t);
  std::vector<double> rho(g.n_nodes);
  for (std::size_t i = 0; i < g.n_nodes; ++i) rho[i] = s[i] * s[i] + s[g.n_nodes + i] * s[g.n_nodes + i];
  return rho;
}

Vector dispersive_shock(const Grid& g) {
  const double rho_l = 2.0, rho_r = 1.0;
  Vector s(2 * g.n_nodes, 0.0);
  for (std::size_t i = 0; i < g.n_nodes; ++i)
    s[i] = std::sqrt(0.5 * (rho_l + rho_r) + 0.5 * (rho_r - rho_l) * std::tanh(100.0 * g.nodes[i]));
  return s;
}

// ---------------------------------------------------------------------------

HydroFields to_hydro(std::span<const double> state, const OperatorSet& ops,
                     double vacuum_threshold) {
  const std::size_t n = ops.size();
  if (state.size() != 2 * n) throw InvalidArgument("to_hydro: state does not match the grid");
  HydroFields h;
  h.rho.resize(n);
  h.theta.resize(n);
  h.vel.assign(n, 0.0);
  h.valid.resize(n);
  std::vector<double> arg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = state[i], w = state[n + i];
    h.rho[i] = v * v + w * w;
    h.valid[i] = h.rho[i] >= vacuum_threshold;
    arg[i] = std::atan2(w, v);
  }
  // Vacuum nodes borrow the phase of the nearest valid node.
  std::size_t first_valid = n;
  for (std::size_t i = 0; i < n && first_valid == n; ++i)
    if (h.valid[i]) first_valid = i;
  if (first_valid == n) return h;
  for (std::size_t i = 0; i < n; ++i) {
    if (h.valid[i]) continue;
    std::size_t best = first_valid;
    for (std::size_t d = 1; d < n; ++d) {
      if (i >= d && h.valid[i - d]) { best = i - d; break; }
      if (i + d < n && h.valid[i + d]) { best = i + d; break; }
    }
    arg[i] = arg[best];
  }
  auto wrap = [](double d) {
    d = std::fmod(d + std::numbers::pi, kTwoPi);
    if (d <= 0.0) d += kTwoPi;
    return d - std::numbers::pi;  // in (-pi, pi]
  };
  h.theta[0] = arg[0];
  for (std::size_t i = 1; i < n; ++i) h.theta[i] = h.theta[i - 1] + wrap(arg[i] - arg[i - 1]);

  if (ops.periodic()) {
    // Remove the whole-turn ramp, differentiate the periodic remainder and
    // add the mean gradient back.
    const double closing = h.theta[n - 1] + wrap(arg[0] - arg[n - 1]);
    const double slope = (closing - h.theta[0]) / ops.grid.length();
    std::vector<double> rest(n);
    for (std::size_t i = 0; i < n; ++i) rest[i] = h.theta[i] - slope * (ops.grid.nodes[i] - ops.grid.x_left);
    ops.d1->apply(rest, h.vel);
    for (double& x : h.vel) x += slope;
  } else {
    ops.d1->apply(h.theta, h.vel);
  }
  return h;
}

double l2_error(const OperatorSet& ops, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = ops.size();
  if (a.size() != 2 * n || b.size() != 2 * n)
    throw InvalidArgument("l2_error: states do not match the grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dv = a[i] - b[i], dw = a[n + i] - b[n + i];
    acc += ops.mass_diag[i] * (dv * dv + dw * dw);
  }
  return std::sqrt(acc);
}

double density_l2_error(const OperatorSet& ops, std::span<const double> a,
                        std::span<const double> b) {
  const std::size_t n = ops.size();
  if (a.size() != 2 * n || b.size() != 2 * n)
    throw InvalidArgument("density_l2_error: states do not match the grid");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (a[i] * a[i] + a[n + i] * a[n + i]) - (b[i] * b[i] + b[n + i] * b[n + i]);
    acc += ops.mass_diag[i] * d * d;
  }
  return std::sqrt(acc);
}

double growth_fit(std::span<const double> times, std::span<const double> errors, double t_floor) {
  if (times.size() != errors.size()) throw FitFailure("growth_fit: length mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_floor) continue;
    if (!(times[i] > 0.0) || !(errors[i] > 0.0) || !std::isfinite(errors[i]))
      throw FitFailure("growth_fit: times and errors must be positive and finite");
    x.push_back(std::log(times[i]));
    y.push_back(std::log(errors[i]));
  }
  if (x.size() < 5) throw FitFailure("growth_fit: need at least 5 samples after the floor");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = m * sxx - sx * sx;
  if (!(det > 1e-14 * m * sxx)) throw FitFailure("growth_fit: sample times are degenerate");
  return (m * sxy - sx * sy) / det;
}

// ---------------------------------------------------------------------------

namespace {

const GraySoliton& default_gray() {
  static std::once_flag once;
  static std::unique_ptr<GraySoliton> gray;
  std::call_once(once, [] { gray = std::make_unique<GraySoliton>(); });
  return *gray;
}

}  // namespace

ProblemSpec problem_by_name(const std::string& name) {
  ProblemSpec p;
  p.name = name;
  if (name == "one_soliton") {
    p.beta = 2.0;
    p.x_left = -40.0;
    p.x_right = 40.0;
    p.initial_state = [](const Grid& g) { return one_soliton(g, 0.0); };
    p.exact_solution = one_soliton;
    p.default_horizon = 1.0;
  } else if (name == "two_soliton") {
    p.beta = 2.0;
    p.x_left = -35.0;
    p.x_right = 35.0;
    p.initial_state = [](const Grid& g) { return bound_state_soliton(2, g); };
    p.exact_solution = two_soliton;
    p.default_horizon = 4.3;
  } else if (name == "three_soliton") {
    p.beta = 2.0;
    p.x_left = -35.0;
    p.x_right = 35.0;
    p.initial_state = [](const Grid& g) { return bound_state_soliton(3, g); };
    p.default_horizon = 4.3;
  } else if (name == "gray_soliton") {
    const GraySoliton& gray = default_gray();
    p.beta = -1.0;
    p.x_left = gray.x_left();
    p.x_right = gray.x_right();
    p.initial_state = [&gray](const Grid& g) { return gray.sample(g, 0.0); };
    p.exact_solution = [&gray](const Grid& g, double t) { return gray.sample(g, t); };
    p.default_horizon = 20.0;
  } else if (name == "dispersive_shock") {
    p.beta = -1.0;
    p.x_left = -1600.0;
    p.x_right = 1600.0;
    p.initial_state = dispersive_shock;
    p.default_horizon = 100.0;
  } else {
    throw InvalidArgument("unknown problem '" + name + "'");
  }
  return p;
}

std::vector<std::string> problem_names() {
  return {"one_soliton", "two_soliton", "three_soliton", "gray_soliton", "dispersive_shock"};
}

}  // namespace sbpnls
