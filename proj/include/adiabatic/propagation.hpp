#pragma once

// Fixed-step integration of i d|psi>/dt = H(t)|psi> and the time-ordered
// propagator U(t) built from midpoint exponentials.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "adiabatic/hamiltonian.hpp"
#include "adiabatic/numerics.hpp"

namespace adiabatic {

struct Trajectory {
  TimeGrid grid;
  std::vector<Vector> states;
  std::vector<Matrix> propagators;  // empty unless accumulated
  double norm_drift = 0.0;

  bool has_propagators() const noexcept { return !propagators.empty(); }
  Index dimension() const { return states.empty() ? 0 : states.front().size(); }
};

struct PropagationOptions {
  double max_norm_drift = 1e-6;
};

namespace detail {

inline void check_initial_state(const Vector& psi0, Index dimension) {
  require(psi0.size() == dimension, ErrorCode::InvalidArgument,
          "initial state has dimension " + std::to_string(psi0.size()) + ", model has " +
              std::to_string(dimension));
  require(psi0.allFinite(), ErrorCode::InvalidArgument, "initial state has non-finite entries");
  require(std::abs(psi0.norm() - 1.0) <= 1e-12, ErrorCode::InvalidArgument,
          "initial state must be normalized");
}

}  // namespace detail

/// Classical fourth-order Runge-Kutta on the grid. The state is never
/// renormalized; the norm drift is reported and bounded instead.
template <HamiltonianSource Model>
Trajectory integrate_rk4(const Model& model, const Vector& psi0, const TimeGrid& grid,
                         const PropagationOptions& options = {}) {
  detail::check_initial_state(psi0, model.dimension());
  const double h = grid.dt();

  Trajectory traj{grid, {}, {}, 0.0};
  traj.states.reserve(grid.nodes());
  traj.states.push_back(psi0);

  Vector psi = psi0;
  Matrix h_start = model.evaluate(grid.time(0));
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double t = grid.time(k);
    const Matrix h_mid = model.evaluate(t + 0.5 * h);
    Matrix h_end = model.evaluate(grid.time(k + 1));

    const Vector k1 = -kI * (h_start * psi);
    const Vector k2 = -kI * (h_mid * (psi + (0.5 * h) * k1));
    const Vector k3 = -kI * (h_mid * (psi + (0.5 * h) * k2));
    const Vector k4 = -kI * (h_end * (psi + h * k3));
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double drift = std::abs(psi.norm() - 1.0);
    if (!(drift <= options.max_norm_drift))
      throw Error(ErrorCode::NormDriftExceeded,
                  "norm drift " + std::to_string(drift) + " at t = " +
                      std::to_string(grid.time(k + 1)) + "; refine the time grid");
    traj.norm_drift = std::max(traj.norm_drift, drift);
    traj.states.push_back(psi);
    h_start = std::move(h_end);
  }
  return traj;
}

/// U(t_k+1) = exp(-i H(t_k + dt/2) dt) U(t_k), U(t_0) = I. States are
/// U(t_k) psi0, with psi0 the first basis vector when not given.
template <HamiltonianSource Model>
Trajectory accumulate_propagator(const Model& model, const TimeGrid& grid,
                                 std::optional<Vector> psi0 = std::nullopt) {
  const Index n = model.dimension();
  if (!psi0) psi0 = Vector::Unit(n, 0);
  detail::check_initial_state(*psi0, n);

  Trajectory traj{grid, {}, {}, 0.0};
  traj.propagators.reserve(grid.nodes());
  traj.states.reserve(grid.nodes());
  traj.propagators.push_back(Matrix::Identity(n, n));
  traj.states.push_back(*psi0);
  const double h = grid.dt();
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const Matrix step = exp_minus_iH_dt(model.evaluate(grid.time(k) + 0.5 * h), h);
    traj.propagators.push_back(step * traj.propagators.back());
    traj.states.push_back(traj.propagators.back() * *psi0);
    traj.norm_drift = std::max(traj.norm_drift, std::abs(traj.states.back().norm() - 1.0));
  }
  return traj;
}

/// Default fixed-step rule: at least `points_per_period` steps per shortest
/// period, refined further so the a-priori RK4 phase error
/// tau * w^5 * dt^4 / 120 stays within `phase_error_budget`.
struct StepRule {
  double points_per_period = 200.0;
  double phase_error_budget = 1e-7;
};

inline std::size_t default_step_count(std::initializer_list<double> frequencies, double tau,
                                      const StepRule& rule = {}) {
  detail::require(std::isfinite(tau) && tau > 0.0, ErrorCode::DomainError,
                  "evolution time must be positive");
  double w_max = 0.0;
  for (double w : frequencies)
    if (std::isfinite(w) && w > 0.0) w_max = std::max(w_max, w);
  detail::require(w_max > 0.0, ErrorCode::DomainError, "no positive frequency for the step rule");
  const double dt_period = 2.0 * std::numbers::pi / w_max / rule.points_per_period;
  const double dt_error =
      std::pow(120.0 * rule.phase_error_budget / (tau * std::pow(w_max, 5)), 0.25);
  const double dt = std::min(dt_period, dt_error);
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tau / dt)));
}

inline std::size_t default_step_count(const SpinHalfParams& p, double tau,
                                      const StepRule& rule = {}) {
  p.validate();
  return default_step_count({p.omega0, p.omega, p.omega_bar()}, tau, rule);
}

}  // namespace adiabatic
