#include "sbpnls/relaxation.hpp"

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>

#include "sbpnls/errors.hpp"
#include "sbpnls/kernels.hpp"

namespace sbpnls {

std::string to_string(RelaxationMode mode) {
  switch (mode) {
    case RelaxationMode::none: return "none";
    case RelaxationMode::standard: return "standard";
    case RelaxationMode::quadratic_preserving: return "quadratic_preserving";
  }
  return "unknown";
}

RelaxationMode relaxation_mode_from_string(const std::string& name) {
  if (name == "none") return RelaxationMode::none;
  if (name == "standard") return RelaxationMode::standard;
  if (name == "quadratic_preserving") return RelaxationMode::quadratic_preserving;
  throw InvalidArgument("unknown relaxation mode '" + name + "'");
}

void RelaxationConfig::validate() const {
  if (!(gamma_tol > 0.0)) throw InvalidArgument("relaxation: gamma_tol must be positive");
  if (!(gamma_bracket > 0.0 && gamma_bracket < 1.0))
    throw InvalidArgument("relaxation: gamma_bracket must lie in (0, 1)");
  if (max_expansions < 0 || max_iterations < 1)
    throw InvalidArgument("relaxation: iteration limits must be positive");
}

Vector project_mass_sphere(const NlsParams& p, std::span<const double> s, double target_mass) {
  const double m = mass(p, s);
  if (!(m > 0.0)) throw ProjectionFailure("cannot project a zero state onto the mass sphere");
  if (!(target_mass >= 0.0)) throw ProjectionFailure("negative target mass");
  const double scale = std::sqrt(target_mass / m);
  Vector out(s.begin(), s.end());
  for (double& x : out) x *= scale;
  return out;
}

namespace {

struct Root {
  double x;
  bool found;
};

// Refines a sign change on [a, b] to full precision and returns the endpoint
// of the final bracket with the smaller residual.
Root refine(const std::function<double(double)>& f, double a, double b, double fa, double fb,
            int max_iterations) {
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iterations);
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(), iters);
  if (iters >= static_cast<std::uintmax_t>(max_iterations)) return {0.0, false};
  const double flo = f(lo), fhi = f(hi);
  return {std::abs(flo) <= std::abs(fhi) ? lo : hi, true};
}

}  // namespace

double solve_gamma(const std::function<double(double)>& residual, const RelaxationConfig& config,
                   double eta_scale) {
  config.validate();
  const double tol = config.gamma_tol * std::max(std::abs(eta_scale), 1.0);
  const double f1 = residual(1.0);
  if (!std::isfinite(f1)) throw RelaxationFailure("relaxation residual is not finite at gamma = 1");
  if (std::abs(f1) <= tol) return 1.0;

  // Probe outward in segments [1-h_k, 1-h_{k-1}] and [1+h_{k-1}, 1+h_k] so the
  // first sign change met is the one nearest to 1.
  double h_prev = 0.0, f_lo_prev = f1, f_hi_prev = f1;
  double h = config.gamma_bracket;
  const double lowest = 0.5 * config.gamma_bracket;  // stay clear of gamma = 0
  bool lower_open = true;
  for (int k = 0; k <= config.max_expansions; ++k, h *= 2.0) {
    std::optional<Root> lo_root, hi_root;
    if (lower_open) {
      double a = 1.0 - h;
      if (a < lowest) {
        a = lowest;
        lower_open = false;
      }
      const double fa = residual(a);
      if (std::isfinite(fa) && std::signbit(fa) != std::signbit(f_lo_prev))
        lo_root = refine(residual, a, 1.0 - h_prev, fa, f_lo_prev, config.max_iterations);
      f_lo_prev = fa;
    }
    const double b = 1.0 + h;
    const double fb = residual(b);
    if (std::isfinite(fb) && std::signbit(fb) != std::signbit(f_hi_prev))
      hi_root = refine(residual, 1.0 + h_prev, b, f_hi_prev, fb, config.max_iterations);
    f_hi_prev = fb;
    h_prev = h;

    std::optional<double> best;
    for (const auto& r : {lo_root, hi_root})
      if (r && r->found && (!best || std::abs(r->x - 1.0) < std::abs(*best - 1.0))) best = r->x;
    if ((lo_root && !lo_root->found) || (hi_root && !hi_root->found))
      if (!best) throw RelaxationFailure("relaxation root solver exceeded its iteration limit");
    if (best) {
      const double fr = residual(*best);
      // The bracket is refined to adjacent doubles, so a residual at the
      // roundoff level of the functional is as good as it gets.
      const double roundoff = 1e3 * std::numeric_limits<double>::epsilon() * std::max(std::abs(eta_scale), 1.0);
      if (std::abs(fr) <= std::max(tol, roundoff))
        return *best;
      throw RelaxationFailure("relaxation residual " + std::to_string(fr) +
                              " above tolerance at gamma = " + std::to_string(*best));
    }
  }
  throw RelaxationFailure("no sign change of the relaxation residual near gamma = 1");
}

StepOutcome quadratic_preserving_step(Stepper& stepper, std::span<const double> u, double dt,
                                      const InvariantPair& inv, const RelaxationTargets& targets,
                                      const RelaxationConfig& config, RelaxationStats* stats) {
  const std::size_t n = u.size();
  Vector provisional(n);
  stepper.step(u, dt, provisional);
  const Vector projected = inv.mu_project(provisional, targets.mu);

  Vector dir(n);
  double dnorm = 0.0, unorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dir[i] = projected[i] - u[i];
    dnorm += dir[i] * dir[i];
    unorm += u[i] * u[i];
  }
  // ||u~ - u^n|| / |dt| approximates ||f(u^n)||; the relaxation equation is
  // degenerate at steady states.
  if (std::sqrt(dnorm) <= 1e-14 * std::abs(dt) * std::sqrt(unorm) || dnorm == 0.0)
    throw RelaxationFailure("relaxation is degenerate: the step does not move the state");

  Vector trial(n);
  std::size_t evals = 0;
  auto point = [&](double g) {
    for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + g * dir[i];
    return inv.mu_project(trial, targets.mu);
  };
  auto residual = [&](double g) {
    ++evals;
    return inv.eta(point(g)) - targets.eta;
  };
  const double gamma = solve_gamma(residual, config, targets.eta);
  StepOutcome out;
  out.state = point(gamma);
  out.gamma = gamma;
  out.dt_taken = gamma * dt;
  if (stats) {
    ++stats->steps;
    stats->residual_evaluations += evals;
    stats->max_abs_gamma_minus_one = std::max(stats->max_abs_gamma_minus_one, std::abs(gamma - 1.0));
  }
  return out;
}

StepOutcome standard_relaxation_step(Stepper& stepper, std::span<const double> u, double dt,
                                     const Functional& eta, double eta_target,
                                     const RelaxationConfig& config, RelaxationStats* stats) {
  const std::size_t n = u.size();
  Vector provisional(n);
  stepper.step(u, dt, provisional);
  double dnorm = 0.0, unorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dnorm += (provisional[i] - u[i]) * (provisional[i] - u[i]);
    unorm += u[i] * u[i];
  }
  if (std::sqrt(dnorm) <= 1e-14 * std::abs(dt) * std::sqrt(unorm) || dnorm == 0.0)
    throw RelaxationFailure("relaxation is degenerate: the step does not move the state");

  Vector trial(n);
  std::size_t evals = 0;
  auto residual = [&](double g) {
    ++evals;
    for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + g * (provisional[i] - u[i]);
    return eta(trial) - eta_target;
  };
  const double gamma = solve_gamma(residual, config, eta_target);
  StepOutcome out;
  out.state.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.state[i] = u[i] + gamma * (provisional[i] - u[i]);
  out.gamma = gamma;
  out.dt_taken = gamma * dt;
  if (stats) {
    ++stats->steps;
    stats->residual_evaluations += evals;
    stats->max_abs_gamma_minus_one = std::max(stats->max_abs_gamma_minus_one, std::abs(gamma - 1.0));
  }
  return out;
}

StepFn make_relaxed_step(std::shared_ptr<Stepper> stepper, InvariantPair inv,
                         RelaxationTargets targets, RelaxationConfig config,
                         std::shared_ptr<RelaxationStats> stats) {
  config.validate();
  switch (config.mode) {
    case RelaxationMode::none: return make_baseline_step(std::move(stepper));
    case RelaxationMode::standard:
      return [=](std::span<const double> u, double, double dt) {
        return standard_relaxation_step(*stepper, u, dt, inv.eta, targets.eta, config, stats.get());
      };
    case RelaxationMode::quadratic_preserving:
      if (!inv.mu_project) throw InvalidArgument("quadratic-preserving relaxation needs a projection");
      return [=](std::span<const double> u, double, double dt) {
        return quadratic_preserving_step(*stepper, u, dt, inv, targets, config, stats.get());
      };
  }
  throw InvalidArgument("unknown relaxation mode");
}

}  // namespace sbpnls
