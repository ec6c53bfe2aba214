#pragma once

// Closed-form dynamics of the spin-half rotating-field model started in
// |E1(0)>: |psi(t)> = a(t)|E1(t)> + b(t)|E2(t)> with
//   a(t) = cos(wb t/2) + i (w0 - w cos th)/wb sin(wb t/2)
//   b(t) = i w sin th / wb sin(wb t/2),  wb = sqrt(w0^2 + w^2 - 2 w0 w cos th).

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "adiabatic/hamiltonian.hpp"
#include "adiabatic/propagation.hpp"
#include "adiabatic/spectral.hpp"

namespace adiabatic {

struct ClosedFormCoefficients {
  double omega_bar = 0.0;
  Complex a;
  Complex b;
};

inline ClosedFormCoefficients closed_form_coefficients(const SpinHalfParams& p, double t) {
  p.validate();
  const double wb = p.omega_bar();
  const double half = 0.5 * wb * t;
  const double sn = std::sin(half);
  return {wb, Complex(std::cos(half), (p.omega0 - p.omega * std::cos(p.theta)) / wb * sn),
          Complex(0.0, p.omega * std::sin(p.theta) / wb * sn)};
}

inline Vector closed_form_state(const SpinHalfParams& p, double t) {
  const ClosedFormCoefficients c = closed_form_coefficients(p, t);
  const SpinHalfEigensystem eig = spin_half_eigensystem(p, t);
  return c.a * eig.state1 + c.b * eig.state2;
}

/// Peak of |b(t)|, reached when wb t = pi.
inline double max_excited_amplitude(const SpinHalfParams& p) {
  p.validate();
  return p.omega * std::sin(p.theta) / p.omega_bar();
}

/// Exact coupling ratio of the model, w sin th / (2 w0), constant in time.
inline double exact_condition_ratio(const SpinHalfParams& p) {
  p.validate();
  return p.omega * std::sin(p.theta) / (2.0 * p.omega0);
}

/// Entries of A = a|E1> and B = b|E2>, whose sum is the exact state.
struct ComponentSplit {
  std::array<Complex, 2> a_part{};
  std::array<Complex, 2> b_part{};
  /// |B_i| / |A_i|; infinity where |A_i| < 1e-15 (flagged in `guarded`).
  std::array<double, 2> ratio{};
  std::array<bool, 2> guarded{};
};

inline ComponentSplit component_split(const SpinHalfParams& p, double t) {
  const ClosedFormCoefficients c = closed_form_coefficients(p, t);
  const SpinHalfEigensystem eig = spin_half_eigensystem(p, t);
  ComponentSplit split;
  for (int i = 0; i < 2; ++i) {
    split.a_part[i] = c.a * eig.state1(i);
    split.b_part[i] = c.b * eig.state2(i);
    const double a_mag = std::abs(split.a_part[i]);
    split.guarded[i] = a_mag < 1e-15;
    split.ratio[i] = split.guarded[i] ? std::numeric_limits<double>::infinity()
                                      : std::abs(split.b_part[i]) / a_mag;
  }
  return split;
}

/// Eigenframes of the model built from the closed-form eigenstates, phases untouched.
inline EigenFrameSeries spin_half_frames(const SpinHalfParams& p, const TimeGrid& grid) {
  std::vector<RealVector> energies(grid.nodes());
  std::vector<Matrix> vectors(grid.nodes());
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    const SpinHalfEigensystem eig = spin_half_eigensystem(p, grid.time(k));
    energies[k] = RealVector(2);
    energies[k] << eig.e1, eig.e2;
    vectors[k] = Matrix(2, 2);
    vectors[k].col(0) = eig.state1;
    vectors[k].col(1) = eig.state2;
  }
  return frames_from_eigenpairs(grid, std::move(energies), std::move(vectors));
}

/// Largest ||psi_rk4(t_k) - psi_exact(t_k)|| over the grid.
template <HamiltonianSource Model, class Exact>
double max_deviation(const Model& model, const Vector& psi0, const TimeGrid& grid,
                     const Exact& exact, const PropagationOptions& options = {}) {
  const Trajectory traj = integrate_rk4(model, psi0, grid, options);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.nodes(); ++k)
    worst = std::max(worst, (traj.states[k] - Vector(exact(grid.time(k)))).norm());
  return worst;
}

inline double verify_against_integrator(const SpinHalfParams& p, const TimeGrid& grid) {
  p.validate();
  const HamiltonianModel model(p);
  return max_deviation(model, closed_form_state(p, grid.t_start()), grid,
                       [&](double t) { return closed_form_state(p, t); });
}

}  // namespace adiabatic
