#pragma once

// Track -> integrate -> analyze compositions shared by the CLI, the sweeps
// and the acceptance suite.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "adiabatic/analysis.hpp"
#include "adiabatic/detail/parallel.hpp"
#include "adiabatic/hamiltonian.hpp"
#include "adiabatic/propagation.hpp"
#include "adiabatic/spectral.hpp"

namespace adiabatic {

struct Evolution {
  EigenFrameSeries frames;
  Trajectory trajectory;
  AdiabaticReference reference;
  AdiabaticReport report;
};

struct EvolveOptions {
  std::size_t level = 0;  // zero-based
  PhaseConvention convention = PhaseConvention::FullAlpha;
  Thresholds thresholds;
  PropagationOptions propagation;
  SpectralOptions spectral;
};

/// Starts in the tracked eigenvector |E_level(t_0)> and analyzes the run.
template <HamiltonianSource Model>
Evolution evolve(const Model& model, const TimeGrid& grid, const EvolveOptions& options = {}) {
  detail::require(options.level < static_cast<std::size_t>(model.dimension()),
                  ErrorCode::InvalidArgument, "level exceeds the model dimension");
  EigenFrameSeries frames = track_frames(model, grid, options.spectral);
  const Vector psi0 = frames.vectors.front().col(static_cast<Index>(options.level)).normalized();
  Trajectory traj = integrate_rk4(model, psi0, grid, options.propagation);
  AdiabaticReference ref = build_reference(frames, options.level, options.convention);
  AdiabaticReport report = analyze(traj, frames, ref, options.thresholds);
  return {std::move(frames), std::move(traj), std::move(ref), std::move(report)};
}

/// Long enough for one field period and two oscillations of the exact coefficients.
inline double default_horizon(const SpinHalfParams& p) {
  p.validate();
  return std::max(2.0 * std::numbers::pi / p.omega, 4.0 * std::numbers::pi / p.omega_bar());
}

inline TimeGrid spin_half_grid(const SpinHalfParams& p, std::optional<double> tau = std::nullopt,
                               std::optional<std::size_t> steps = std::nullopt) {
  const double horizon = tau.value_or(default_horizon(p));
  return TimeGrid(0.0, horizon, steps.value_or(default_step_count(p, horizon)));
}

struct SweepPoint {
  SpinHalfParams params;
  double max_ratio = 0.0;
  double min_fidelity = 0.0;
  double exact_rate = 0.0;
  double reference_rate = 0.0;
  bool condition_satisfied = false;
  bool approximation_valid = false;

  /// A run that contradicts necessity: valid approximation, violated condition.
  bool counterexample() const { return approximation_valid && !condition_satisfied; }
};

/// Spin-half runs over (w0/w) x theta with w = 1, started in level 1,
/// ordered by ratio then theta.
inline std::vector<SweepPoint> necessity_sweep(std::span<const double> frequency_ratios,
                                               std::span<const double> thetas,
                                               const Thresholds& thresholds = {}) {
  std::vector<SpinHalfParams> params;
  for (double r : frequency_ratios)
    for (double th : thetas) params.push_back({r, 1.0, th});
  for (const auto& p : params) p.validate();

  std::vector<SweepPoint> points(params.size());
  detail::parallel_for(params.size(), [&](std::size_t i) {
    const SpinHalfParams& p = params[i];
    EvolveOptions options;
    options.thresholds = thresholds;
    const Evolution run = evolve(HamiltonianModel(p), spin_half_grid(p), options);
    const AdiabaticReport& rep = run.report;
    points[i] = {p,
                 rep.condition.max_ratio,
                 rep.min_fidelity,
                 rep.rates ? rep.rates->exact_rate : 0.0,
                 rep.rates ? rep.rates->reference_rate : 0.0,
                 rep.condition_satisfied,
                 rep.approximation_valid};
  });
  return points;
}

}  // namespace adiabatic
