#include "sbpnls/integrators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "sbpnls/errors.hpp"
#include "sbpnls/kernels.hpp"

namespace sbpnls {

namespace {

void require_finite(std::span<const double> u, const char* what) {
  for (double x : u)
    if (!std::isfinite(x)) throw NumericFailure(std::string(what) + ": non-finite state");
}

}  // namespace

Stepper::Stepper(SplitOde ode, const ImexTableau& tableau)
    : ode_(std::move(ode)), tableau_(tableau) {
  validate_tableau(tableau_);
  const std::size_t s = static_cast<std::size_t>(tableau_.stages), n = ode_.dimension;
  if (n == 0) throw InvalidArgument("Stepper: empty system");
  if (!ode_.full_rhs) throw InvalidArgument("Stepper: missing right-hand side");
  if (!tableau_.is_explicit() && (!ode_.linear_rhs || !ode_.nonlinear_rhs || !ode_.implicit_solve))
    throw InvalidArgument("Stepper: IMEX tableau '" + tableau_.name + "' needs a split system");
  k_explicit_.assign(s, Vector(n));
  if (!tableau_.is_explicit()) k_implicit_.assign(s, Vector(n));
  stage_.resize(n);
  rhs_.resize(n);
  coeffs_.reserve(2 * s);
  terms_.reserve(2 * s);
}

void Stepper::step(std::span<const double> u, double dt, std::span<double> out) {
  if (u.size() != ode_.dimension || out.size() != ode_.dimension)
    throw InvalidArgument("Stepper::step: state dimension mismatch");
  if (tableau_.is_explicit())
    erk(u, dt, out);
  else
    imex(u, dt, out);
  require_finite(out, tableau_.name.c_str());
}

void Stepper::erk(std::span<const double> u, double dt, std::span<double> out) {
  const int s = tableau_.stages;
  for (int i = 0; i < s; ++i) {
    coeffs_.clear();
    terms_.clear();
    for (int j = 0; j < i; ++j) {
      coeffs_.push_back(tableau_.a_explicit[i][j]);
      terms_.push_back(k_explicit_[j].data());
    }
    kernels::combine(stage_, u, dt, coeffs_, terms_);
    ode_.full_rhs(stage_, k_explicit_[i]);
    ++rhs_evals_;
  }
  coeffs_.assign(tableau_.b_explicit.begin(), tableau_.b_explicit.end());
  terms_.clear();
  for (int j = 0; j < s; ++j) terms_.push_back(k_explicit_[j].data());
  kernels::combine(out, u, dt, coeffs_, terms_);
}

void Stepper::imex(std::span<const double> u, double dt, std::span<double> out) {
  const int s = tableau_.stages;
  for (int i = 0; i < s; ++i) {
    coeffs_.clear();
    terms_.clear();
    for (int j = 0; j < i; ++j) {
      coeffs_.push_back(tableau_.a_explicit[i][j]);
      terms_.push_back(k_explicit_[j].data());
      coeffs_.push_back(tableau_.a_implicit[i][j]);
      terms_.push_back(k_implicit_[j].data());
    }
    kernels::combine(rhs_, u, dt, coeffs_, terms_);
    const double diag = tableau_.a_implicit[i][i] * dt;
    if (diag != 0.0) {
      ode_.implicit_solve(diag, rhs_, stage_);
      ++solves_;
    } else {
      std::copy(rhs_.begin(), rhs_.end(), stage_.begin());
    }
    if (i == s - 1 && tableau_.stiffly_accurate()) {
      std::copy(stage_.begin(), stage_.end(), out.begin());
      return;
    }
    ode_.nonlinear_rhs(stage_, k_explicit_[i]);
    ode_.linear_rhs(stage_, k_implicit_[i]);
    rhs_evals_ += 2;
  }
  coeffs_.clear();
  terms_.clear();
  for (int j = 0; j < s; ++j) {
    coeffs_.push_back(tableau_.b_explicit[j]);
    terms_.push_back(k_explicit_[j].data());
    coeffs_.push_back(tableau_.b_implicit[j]);
    terms_.push_back(k_implicit_[j].data());
  }
  kernels::combine(out, u, dt, coeffs_, terms_);
}

Vector erk_step(const SplitOde& ode, const ImexTableau& tableau, std::span<const double> u,
                double dt) {
  if (!tableau.is_explicit())
    throw InvalidArgument("erk_step: tableau '" + tableau.name + "' is not explicit");
  if (!(dt > 0.0)) throw InvalidArgument("erk_step: dt must be positive");
  Stepper st(ode, tableau);
  Vector out(u.size());
  st.step(u, dt, out);
  return out;
}

Vector imex_step(const SplitOde& ode, const ImexTableau& tableau, std::span<const double> u,
                 double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("imex_step: dt must be positive");
  Stepper st(ode, tableau);
  Vector out(u.size());
  st.step(u, dt, out);
  return out;
}

StepFn make_baseline_step(std::shared_ptr<Stepper> stepper) {
  return [stepper](std::span<const double> u, double, double dt) {
    StepOutcome o;
    o.state.resize(u.size());
    stepper->step(u, dt, o.state);
    o.dt_taken = dt;
    return o;
  };
}

// ---------------------------------------------------------------------------

const IntegrateResult& IntegrateResult::require_completed() const {
  if (!record.completed) throw NumericFailure("integration stopped early: " + record.failure);
  return *this;
}

IntegrateResult integrate(const StepFn& step, std::span<const double> state0,
                          const IntegrateOptions& opt) {
  if (!(opt.t_end > opt.t0)) throw InvalidArgument("integrate: need t_end > t0");
  if (!(opt.dt > 0.0)) throw InvalidArgument("integrate: need dt > 0");
  const auto start = std::chrono::steady_clock::now();

  IntegrateResult res;
  res.state.assign(state0.begin(), state0.end());
  res.t = opt.t0;
  RunRecord& rec = res.record;
  const bool monitor = static_cast<bool>(opt.mass) && static_cast<bool>(opt.energy);
  auto record_row = [&](std::size_t k, double gamma) {
    if (!monitor) return;
    StepRow row{k, res.t, gamma, opt.mass(res.state), opt.energy(res.state), std::nullopt};
    if (opt.naive_energy) row.naive_energy = opt.naive_energy(res.state);
    rec.rows.push_back(row);
  };
  record_row(0, 1.0);

  std::vector<double> breaks;
  for (double ts : opt.snapshot_times)
    if (ts > opt.t0 && ts < opt.t_end) breaks.push_back(ts);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  breaks.push_back(opt.t_end);
  for (double ts : opt.snapshot_times)
    if (ts == opt.t0) rec.snapshots.push_back({opt.t0, opt.t0, res.state});

  const double eps = 1e-10 * opt.dt;
  double t_nom = opt.t0;
  std::size_t next_break = 0;
  try {
    while (next_break < breaks.size()) {
      const double target = breaks[next_break];
      double h = std::min(opt.dt, target - t_nom);
      // Avoid a sliver of a step caused by rounding of the nominal grid.
      if (target - t_nom - h <= eps) h = target - t_nom;
      StepOutcome out;
      for (int attempt = 0;; ++attempt) {
        try {
          out = step(res.state, res.t, h);
          break;
        } catch (const RelaxationFailure&) {
          if (attempt >= opt.max_step_halvings) throw;
        } catch (const ProjectionFailure&) {
          if (attempt >= opt.max_step_halvings) throw;
        }
        h *= 0.5;
        ++rec.step_retries;
      }
      res.state = std::move(out.state);
      res.t += out.dt_taken;
      t_nom += h;
      ++rec.steps;
      const bool at_break = target - t_nom <= eps;
      if (at_break) t_nom = target;
      if (rec.steps % opt.record_every == 0 || at_break) record_row(rec.steps, out.gamma);
      if (at_break) {
        if (next_break + 1 < breaks.size() ||
            std::find(opt.snapshot_times.begin(), opt.snapshot_times.end(), target) !=
                opt.snapshot_times.end())
          rec.snapshots.push_back({target, res.t, res.state});
        ++next_break;
      }
    }
    if (opt.land_on_t_end && res.t != opt.t_end) {
      if (!opt.landing_step) throw InvalidArgument("integrate: landing requested without a step");
      StepOutcome out = opt.landing_step(res.state, res.t, opt.t_end - res.t);
      res.state = std::move(out.state);
      res.t = opt.t_end;
      ++rec.steps;
      record_row(rec.steps, 1.0);
      if (!rec.snapshots.empty() && rec.snapshots.back().t_nominal == opt.t_end)
        rec.snapshots.back() = {opt.t_end, res.t, res.state};
    }
    rec.completed = true;
  } catch (const std::exception& e) {
    rec.failure = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace sbpnls
