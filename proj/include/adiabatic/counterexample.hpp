#pragma once

// Dual construction H_b(t) = i dU_a^H/dt U_a(t) = -U_a^H(t) H_a(t) U_a(t).
// Both systems share their coupling ratios, yet the adiabatic approximation
// cannot hold for both.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "adiabatic/analysis.hpp"
#include "adiabatic/detail/parallel.hpp"
#include "adiabatic/hamiltonian.hpp"
#include "adiabatic/pipeline.hpp"
#include "adiabatic/propagation.hpp"

namespace adiabatic {

struct PairEvaluation {
  std::size_t level_a = 0;
  std::size_t level_b = 0;  // worst-case initial level of system b
  AdiabaticReport report_a;
  AdiabaticReport report_b;
  double ratio_a = 0.0;
  double ratio_b = 0.0;
  double min_fidelity_a = 0.0;
  double min_fidelity_b = 0.0;
  bool ratios_agree = false;  // within 10 %
  bool at_least_one_invalid = false;
};

struct DualPair {
  HamiltonianModel model_a;
  HamiltonianModel model_b;
  TimeGrid grid;
  /// Largest |i dU^H/dt U + U^H H_a U| entry over interior nodes (central differences).
  double cross_check_deviation = 0.0;
  std::optional<PairEvaluation> evaluation;
};

/// i (U^H(t+dt) - U^H(t-dt)) / (2 dt) U(t) at interior node k.
inline Matrix literal_dual(const std::vector<Matrix>& u, std::size_t k, double dt) {
  return kI * (u[k + 1].adjoint() - u[k - 1].adjoint()) * u[k] / (2.0 * dt);
}

/// Largest deviation between -U^H H_a U and the literal central-difference
/// dual over interior nodes; throws CrossCheckFailed past the tolerance.
/// The central difference errs by about |H_a|^3 dt^2 / 6, so the tolerance
/// max(100 dt^2, 1e-6) is scaled by s^3 and s, s = max(1, |H_a(t)|_F).
inline double dual_cross_check(const HamiltonianModel& model_a, const TimeGrid& grid,
                               const std::vector<Matrix>& propagators) {
  detail::require(propagators.size() == grid.nodes(), ErrorCode::GridMismatch,
                  "propagator series does not match the grid");
  const double dt = grid.dt();
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < grid.nodes(); ++k) {
    const Matrix h_a = model_a.evaluate(grid.time(k));
    const Matrix& u = propagators[k];
    const Matrix h_b = -(u.adjoint() * h_a * u);
    const double deviation = max_abs(literal_dual(propagators, k, dt) - h_b);
    const double s = std::max(1.0, h_a.norm());
    const double tol = std::max(100.0 * dt * dt * s * s * s, 1e-6 * s);
    if (!(deviation <= tol))
      throw Error(ErrorCode::CrossCheckFailed,
                  "dual Hamiltonian deviates from i dU^H/dt U by " + std::to_string(deviation) +
                      " at t = " + std::to_string(grid.time(k)));
    worst = std::max(worst, deviation);
  }
  return worst;
}

/// Builds H_b from the midpoint propagator of `model_a` on `grid`.
inline DualPair build_dual(const HamiltonianModel& model_a, const TimeGrid& grid) {
  detail::require(grid.nodes() >= 3, ErrorCode::InvalidArgument,
                  "dual construction needs at least three grid nodes");
  Trajectory prop = accumulate_propagator(model_a, grid);
  auto source = std::make_shared<const HamiltonianModel>(model_a);
  auto propagators = std::make_shared<const std::vector<Matrix>>(std::move(prop.propagators));
  const double worst = dual_cross_check(model_a, grid, *propagators);
  HamiltonianModel model_b(DualOf(source, grid, propagators));
  return {model_a, std::move(model_b), grid, worst, std::nullopt};
}

/// Runs system a from `level_a` and system b from every level, keeping the
/// worst (lowest-fidelity) run of b. The jobs run concurrently.
inline DualPair evaluate_pair(DualPair pair, std::size_t level_a,
                              const Thresholds& thresholds = {}) {
  const auto dim = static_cast<std::size_t>(pair.model_a.dimension());
  detail::require(level_a < dim, ErrorCode::InvalidArgument, "level exceeds the dimension");

  std::vector<std::optional<Evolution>> runs(dim + 1);
  detail::parallel_for(dim + 1, [&](std::size_t job) {
    EvolveOptions options;
    options.thresholds = thresholds;
    if (job == 0) {
      options.level = level_a;
      runs[job] = evolve(pair.model_a, pair.grid, options);
    } else {
      options.level = job - 1;
      runs[job] = evolve(pair.model_b, pair.grid, options);
    }
  });

  std::size_t worst = 1;
  for (std::size_t job = 2; job <= dim; ++job)
    if (runs[job]->report.min_fidelity < runs[worst]->report.min_fidelity) worst = job;

  PairEvaluation eval;
  eval.level_a = level_a;
  eval.level_b = worst - 1;
  eval.report_a = std::move(runs[0]->report);
  eval.report_b = std::move(runs[worst]->report);
  eval.ratio_a = eval.report_a.condition.max_ratio;
  eval.ratio_b = eval.report_b.condition.max_ratio;
  eval.min_fidelity_a = eval.report_a.min_fidelity;
  eval.min_fidelity_b = eval.report_b.min_fidelity;
  eval.ratios_agree = std::abs(eval.ratio_a - eval.ratio_b) <= 0.1 * std::abs(eval.ratio_a);
  eval.at_least_one_invalid =
      !(eval.report_a.approximation_valid && eval.report_b.approximation_valid);
  pair.evaluation = std::move(eval);
  return pair;
}

}  // namespace adiabatic
