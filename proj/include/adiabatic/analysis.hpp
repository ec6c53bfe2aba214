#pragma once

// Adiabatic reference state, eigenbasis coefficients, fidelity, Bloch-vector
// diagnostics, the necessity residual and the f(w0/w) curve of the
// spin-half model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adiabatic/numerics.hpp"
#include "adiabatic/propagation.hpp"
#include "adiabatic/spectral.hpp"

namespace adiabatic {

enum class PhaseConvention {
  /// alpha = -int E_n dt + i int <E_n|dE_n/dt> dt
  FullAlpha,
  /// alpha = -int E_n dt
  DynamicalOnly,
};

struct AdiabaticReference {
  std::size_t level = 0;  // zero-based
  TimeGrid grid{0.0, 1.0, 1};
  std::vector<double> alpha;
  std::vector<Vector> states;  // e^{i alpha} |E_n>
  PhaseConvention convention = PhaseConvention::FullAlpha;
};

struct ReferenceOptions {
  /// Bound on |Re <E_n|dE_n/dt>|; larger values mean the frame phases jump.
  double max_real_connection = 1e-6;
};

inline AdiabaticReference build_reference(const EigenFrameSeries& frames, std::size_t level,
                                          PhaseConvention convention,
                                          const ReferenceOptions& options = {}) {
  detail::require(level < static_cast<std::size_t>(frames.dimension()), ErrorCode::InvalidArgument,
                  "level " + std::to_string(level + 1) + " exceeds the dimension");
  const std::size_t count = frames.nodes();
  const double h = frames.grid.dt();
  const auto n = static_cast<Index>(level);

  // Integrand of alpha at each node.
  std::vector<double> rate(count);
  for (std::size_t k = 0; k < count; ++k) rate[k] = -frames.energies[k](n);
  if (convention == PhaseConvention::FullAlpha) {
    const std::vector<Matrix> connection = connection_matrices(frames);
    for (std::size_t k = 0; k < count; ++k) {
      const Complex c = connection[k](n, n);
      if (std::abs(c.real()) > options.max_real_connection)
        throw Error(ErrorCode::GaugeImaginaryPartExceeded,
                    "Re<E_n|dE_n/dt> = " + std::to_string(c.real()) + " at t = " +
                        std::to_string(frames.grid.time(k)));
      // i * (i Im c) = -Im c
      rate[k] -= c.imag();
    }
  }

  AdiabaticReference ref;
  ref.level = level;
  ref.grid = frames.grid;
  ref.convention = convention;
  ref.alpha.assign(count, 0.0);
  for (std::size_t k = 1; k < count; ++k)
    ref.alpha[k] = ref.alpha[k - 1] + 0.5 * h * (rate[k - 1] + rate[k]);
  ref.states.reserve(count);
  for (std::size_t k = 0; k < count; ++k)
    ref.states.push_back(std::exp(kI * ref.alpha[k]) * frames.vectors[k].col(n));
  return ref;
}

struct BlochSeries {
  std::vector<Eigen::Vector3d> vectors;
  std::vector<double> azimuth;  // unwrapped arg(b_x + i b_y)
  std::vector<bool> defined;    // false near the poles, where the azimuth is noise
  double rate = 0.0;            // least-squares slope of the azimuth over defined nodes
};

/// Transverse Bloch length below which the azimuth is not used.
inline constexpr double kPolarFloor = 1e-8;

/// Slope of `values` against the grid times, restricted to nodes where
/// `mask` is set (all nodes when it is empty). Zero with fewer than two nodes.
inline double least_squares_slope(const TimeGrid& grid, const std::vector<double>& values,
                                  const std::vector<bool>& mask = {}) {
  auto used = [&](std::size_t k) { return mask.empty() || mask[k]; };
  std::size_t count = 0;
  double t_mean = 0.0, v_mean = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!used(k)) continue;
    ++count;
    t_mean += grid.time(k);
    v_mean += values[k];
  }
  if (count < 2) return 0.0;
  t_mean /= static_cast<double>(count);
  v_mean /= static_cast<double>(count);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!used(k)) continue;
    const double dt = grid.time(k) - t_mean;
    num += dt * (values[k] - v_mean);
    den += dt * dt;
  }
  return den > 0.0 ? num / den : 0.0;
}

inline BlochSeries bloch_series(const TimeGrid& grid, const std::vector<Vector>& states) {
  detail::require(states.size() == grid.nodes(), ErrorCode::GridMismatch,
                  "state series length does not match the grid");
  BlochSeries series;
  series.vectors.reserve(states.size());
  series.azimuth.reserve(states.size());
  series.defined.reserve(states.size());
  bool have_previous = false;
  for (const Vector& psi : states) {
    detail::require(psi.size() == 2, ErrorCode::DimensionNotTwo,
                    "Bloch vectors need a two-level state");
    const Complex coherence = std::conj(psi(0)) * psi(1);
    series.vectors.emplace_back(2.0 * coherence.real(), 2.0 * coherence.imag(),
                                std::norm(psi(0)) - std::norm(psi(1)));
    const bool defined = 2.0 * std::abs(coherence) >= kPolarFloor;
    double phi = std::atan2(coherence.imag(), coherence.real());
    if (!defined) {
      phi = series.azimuth.empty() ? 0.0 : series.azimuth.back();
    } else if (have_previous) {
      const double prev = series.azimuth.back();
      phi += 2.0 * std::numbers::pi * std::round((prev - phi) / (2.0 * std::numbers::pi));
    }
    have_previous = have_previous || defined;
    series.azimuth.push_back(phi);
    series.defined.push_back(defined);
  }
  series.rate = least_squares_slope(grid, series.azimuth, series.defined);
  return series;
}

struct Thresholds {
  double condition = 0.1;       // max coupling ratio for "condition satisfied"
  double fidelity = 0.99;       // min fidelity for a valid approximation
  double rate_tolerance = 0.1;  // relative Bloch-rate agreement (two-level only)
};

struct RateComparison {
  double exact_rate = 0.0;
  double reference_rate = 0.0;
  bool agree = false;

  /// Larger over smaller rate magnitude.
  double ratio() const {
    const double hi = std::max(std::abs(exact_rate), std::abs(reference_rate));
    const double lo = std::min(std::abs(exact_rate), std::abs(reference_rate));
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  }
};

struct AdiabaticReport {
  std::size_t level = 0;
  PhaseConvention convention = PhaseConvention::FullAlpha;
  ConditionReport condition;
  std::vector<double> fidelity;
  double min_fidelity = 1.0;
  std::size_t argmin_node = 0;
  std::vector<std::vector<double>> coefficients;  // [node][m] = |c_m(t_k)|
  std::vector<double> coefficient_max;            // per level
  double norm_drift = 0.0;
  std::optional<RateComparison> rates;
  Thresholds thresholds;
  bool condition_satisfied = false;
  bool approximation_valid = false;

  const TimeGrid& grid() const { return condition.grid; }
  double argmin_time() const { return grid().time(argmin_node); }
};

inline AdiabaticReport analyze(const Trajectory& traj, const EigenFrameSeries& frames,
                               const AdiabaticReference& ref, const Thresholds& thresholds = {}) {
  detail::require(traj.grid == frames.grid && ref.grid == frames.grid, ErrorCode::GridMismatch,
                  "trajectory, frames and reference must share one grid");
  detail::require(traj.dimension() == frames.dimension(), ErrorCode::InvalidArgument,
                  "trajectory and frames differ in dimension");
  const std::size_t count = frames.nodes();
  const auto dim = static_cast<std::size_t>(frames.dimension());

  AdiabaticReport report;
  report.level = ref.level;
  report.convention = ref.convention;
  report.thresholds = thresholds;
  report.norm_drift = traj.norm_drift;
  report.condition = coupling_ratios(frames);
  report.fidelity.resize(count);
  report.coefficients.assign(count, std::vector<double>(dim, 0.0));
  report.coefficient_max.assign(dim, 0.0);
  report.min_fidelity = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < count; ++k) {
    const Vector c = frames.vectors[k].adjoint() * traj.states[k];
    for (std::size_t m = 0; m < dim; ++m) {
      const double mag = std::abs(c(static_cast<Index>(m)));
      report.coefficients[k][m] = mag;
      report.coefficient_max[m] = std::max(report.coefficient_max[m], mag);
    }
    const double fid = std::abs(ref.states[k].dot(traj.states[k]));
    report.fidelity[k] = fid;
    if (fid < report.min_fidelity) {
      report.min_fidelity = fid;
      report.argmin_node = k;
    }
  }

  if (dim == 2) {
    RateComparison rates;
    rates.exact_rate = bloch_series(traj.grid, traj.states).rate;
    rates.reference_rate = bloch_series(ref.grid, ref.states).rate;
    rates.agree = std::abs(rates.exact_rate - rates.reference_rate) <=
                  thresholds.rate_tolerance * std::abs(rates.reference_rate) + 1e-9;
    report.rates = rates;
  }

  report.condition_satisfied = report.condition.max_ratio <= thresholds.condition;
  report.approximation_valid =
      report.min_fidelity >= thresholds.fidelity && (!report.rates || report.rates->agree);
  return report;
}

/// |c_m(t)| set against g_mn(t) = |<E_m|dE_n/dt>/(E_m - E_n)| for the
/// reference level n, summarized over consecutive windows.
struct NecessityPair {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<double> coefficient;
  std::vector<double> ratio;
  /// max_W |c_m| / max_W g_mn per window (0 when both vanish).
  std::vector<double> window_ratio;
  double min_window_ratio = 0.0;
  double max_window_ratio = 0.0;

  bool within(double lo, double hi) const {
    return min_window_ratio >= lo && max_window_ratio <= hi;
  }
};

struct NecessityResidual {
  double window = 0.0;
  std::vector<NecessityPair> pairs;
};

inline NecessityResidual necessity_residual(const AdiabaticReport& report, double window) {
  detail::require(report.approximation_valid, ErrorCode::PreconditionNotMet,
                  "necessity residual assumes a valid adiabatic approximation");
  const TimeGrid& grid = report.grid();
  detail::require(std::isfinite(window) && window > 0.0 && window <= grid.span() * (1.0 + 1e-12),
                  ErrorCode::DomainError, "window must be positive and fit inside the grid");
  const std::size_t count = grid.nodes();
  const std::size_t dim = report.coefficient_max.size();
  const auto windows = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(grid.span() / window * (1.0 + 1e-12))));

  NecessityResidual out;
  out.window = window;
  const std::size_t n = report.level;
  for (std::size_t m = 0; m < dim; ++m) {
    if (m == n) continue;
    const PairSeries* g = report.condition.find(m, n);
    NecessityPair pair;
    pair.m = m;
    pair.n = n;
    pair.ratio = g->ratio;
    pair.coefficient.resize(count);
    for (std::size_t k = 0; k < count; ++k) pair.coefficient[k] = report.coefficients[k][m];

    for (std::size_t w = 0; w < windows; ++w) {
      const double lo = grid.t_start() + static_cast<double>(w) * window;
      const double hi = lo + window;
      double c_max = 0.0, g_max = 0.0;
      for (std::size_t k = 0; k < count; ++k) {
        const double t = grid.time(k);
        if (t < lo - 1e-12 * window || t > hi + 1e-12 * window) continue;
        c_max = std::max(c_max, pair.coefficient[k]);
        g_max = std::max(g_max, pair.ratio[k]);
      }
      double value = 0.0;
      if (g_max > 0.0) value = c_max / g_max;
      else if (c_max > 0.0) value = std::numeric_limits<double>::infinity();
      pair.window_ratio.push_back(value);
    }
    pair.min_window_ratio = *std::min_element(pair.window_ratio.begin(), pair.window_ratio.end());
    pair.max_window_ratio = *std::max_element(pair.window_ratio.begin(), pair.window_ratio.end());
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

/// f(r) = sin(th) / sqrt(r^2 - 2 r cos(th) + 1), r = w0 / w.
inline double f_function(double r, double theta) {
  detail::require(std::isfinite(r) && r > 0.0, ErrorCode::DomainError, "r must be positive");
  detail::require(std::isfinite(theta) && theta > 0.0 && theta < std::numbers::pi,
                  ErrorCode::DomainError, "theta must lie in (0, pi)");
  return std::sin(theta) / std::sqrt(r * r - 2.0 * r * std::cos(theta) + 1.0);
}

/// Tabulated f with shape verdicts. Verdicts that do not apply to the given
/// theta, or whose interval holds no sample, are left empty. Bounds are
/// compared up to 1e-12 so that exact ties count as satisfied.
struct FSweep {
  double theta = 0.0;
  std::vector<double> r;
  std::vector<double> f;
  std::size_t argmax = 0;
  double r_peak = 0.0;
  double f_peak = 0.0;
  bool strictly_decreasing = false;
  std::optional<bool> peak_at_cos_theta;           // theta <= pi/2
  std::optional<bool> increase_then_decrease;      // theta <= pi/2
  std::optional<bool> above_sin_theta_to_peak;     // theta <= pi/2: f > sin th on (0, cos th]
  std::optional<bool> above_sin_half_theta;        // (cos th, 1] or (0, 1]
  std::optional<bool> above_cos_half_theta;        // theta > pi/2: f >= cos(th/2) on (0, 1]
};

inline FSweep f_sweep(double theta, double r_min, double r_max, std::size_t points) {
  detail::require(std::isfinite(theta) && theta > 0.0 && theta < std::numbers::pi,
                  ErrorCode::DomainError, "theta must lie in (0, pi)");
  detail::require(std::isfinite(r_min) && std::isfinite(r_max) && r_min > 0.0 && r_min < r_max,
                  ErrorCode::DomainError, "sweep needs 0 < r_min < r_max");
  detail::require(points >= 2, ErrorCode::DomainError, "sweep needs at least two points");

  constexpr double kTieTol = 1e-12;
  FSweep sweep;
  sweep.theta = theta;
  sweep.r.resize(points);
  sweep.f.resize(points);
  const double step = (r_max - r_min) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) {
    sweep.r[i] = i + 1 == points ? r_max : r_min + static_cast<double>(i) * step;
    sweep.f[i] = f_function(sweep.r[i], theta);
  }
  sweep.argmax = static_cast<std::size_t>(
      std::max_element(sweep.f.begin(), sweep.f.end()) - sweep.f.begin());
  sweep.r_peak = sweep.r[sweep.argmax];
  sweep.f_peak = sweep.f[sweep.argmax];

  sweep.strictly_decreasing = true;
  for (std::size_t i = 1; i < points; ++i)
    if (!(sweep.f[i] < sweep.f[i - 1])) sweep.strictly_decreasing = false;

  // nullopt when no sample lies in (lo, hi]
  auto bound_holds = [&](double lo, double hi, double bound, bool strict) -> std::optional<bool> {
    bool any = false;
    bool ok = true;
    for (std::size_t i = 0; i < points; ++i) {
      if (sweep.r[i] <= lo || sweep.r[i] > hi) continue;
      any = true;
      const bool pass = strict ? sweep.f[i] > bound - kTieTol : sweep.f[i] >= bound - kTieTol;
      ok = ok && pass;
    }
    return any ? std::optional<bool>(ok) : std::nullopt;
  };

  const double c = std::cos(theta);
  const double sin_half = std::sin(0.5 * theta);
  if (theta <= 0.5 * std::numbers::pi) {
    const double expected_peak = std::clamp(c, r_min, r_max);
    sweep.peak_at_cos_theta = std::abs(sweep.r_peak - expected_peak) <= step;
    bool unimodal = true;
    for (std::size_t i = 1; i < points; ++i) {
      const bool rising = sweep.f[i] > sweep.f[i - 1];
      if (i <= sweep.argmax ? !rising : rising) unimodal = false;
    }
    sweep.increase_then_decrease = unimodal;
    sweep.above_sin_theta_to_peak = bound_holds(0.0, c, std::sin(theta), true);
    sweep.above_sin_half_theta = bound_holds(c, 1.0, sin_half, true);
  } else {
    sweep.above_sin_half_theta = bound_holds(0.0, 1.0, sin_half, true);
    sweep.above_cos_half_theta = bound_holds(0.0, 1.0, std::cos(0.5 * theta), false);
  }
  return sweep;
}

}  // namespace adiabatic
