#pragma once

// Instantaneous eigenframes along a time grid and the coupling ratios
// |<E_n|dE_m/dt>| / |E_n - E_m| of the quantitative adiabatic condition.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "adiabatic/detail/parallel.hpp"
#include "adiabatic/hamiltonian.hpp"
#include "adiabatic/numerics.hpp"

namespace adiabatic {

enum class FrameGauge {
  /// Successive overlaps <v_m(t_k)|v_m(t_k+1)> made real and positive.
  PhaseContinuous,
  /// Phases as handed in by the caller (e.g. closed-form eigenstates).
  Supplied,
};

struct EigenFrameSeries {
  TimeGrid grid;
  std::vector<RealVector> energies;  // ascending per node
  std::vector<Matrix> vectors;       // column m is |E_m(t_k)>
  double min_gap = std::numeric_limits<double>::infinity();
  FrameGauge gauge = FrameGauge::PhaseContinuous;

  Index dimension() const { return vectors.empty() ? 0 : vectors.front().rows(); }
  std::size_t nodes() const { return vectors.size(); }
};

struct SpectralOptions {
  EigOptions eig;
  /// Largest tolerated |<v_m(t_k)|v_j(t_k+1)>| for j != m before declaring a crossing.
  double crossing_overlap = 0.5;
};

namespace detail {

inline double series_min_gap(const std::vector<RealVector>& energies) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& e : energies)
    for (Index i = 1; i < e.size(); ++i) gap = std::min(gap, e(i) - e(i - 1));
  return gap;
}

inline void check_series_shape(const TimeGrid& grid, const std::vector<RealVector>& energies,
                               const std::vector<Matrix>& vectors) {
  require(energies.size() == grid.nodes() && vectors.size() == grid.nodes(),
          ErrorCode::GridMismatch, "frame series length does not match the grid");
  const Index n = vectors.front().rows();
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    require(vectors[k].rows() == n && vectors[k].cols() == n && energies[k].size() == n,
            ErrorCode::InvalidArgument, "inconsistent frame dimension at node " + std::to_string(k));
  }
}

}  // namespace detail

/// Fixes the phase of every eigenvector so that successive overlaps are real
/// and positive, starting from the phases at the first node. Levels are
/// identified by energy order; a non-diagonally-dominant overlap is a crossing.
inline EigenFrameSeries gauge_fix(const TimeGrid& grid, std::vector<RealVector> energies,
                                  std::vector<Matrix> raw_vectors,
                                  const SpectralOptions& options = {}) {
  detail::check_series_shape(grid, energies, raw_vectors);
  const Index n = raw_vectors.front().rows();
  for (std::size_t k = 1; k < raw_vectors.size(); ++k) {
    const Matrix overlap = raw_vectors[k - 1].adjoint() * raw_vectors[k];
    for (Index m = 0; m < n; ++m) {
      for (Index j = 0; j < n; ++j) {
        if (j != m && std::abs(overlap(m, j)) > options.crossing_overlap)
          throw Error(ErrorCode::LevelCrossing,
                      "levels " + std::to_string(m + 1) + " and " + std::to_string(j + 1) +
                          " exchange character near t = " + std::to_string(grid.time(k)));
      }
      const double diag = std::abs(overlap(m, m));
      if (diag < options.crossing_overlap)
        throw Error(ErrorCode::LevelCrossing,
                    "level " + std::to_string(m + 1) + " loses continuity near t = " +
                        std::to_string(grid.time(k)));
      raw_vectors[k].col(m) *= std::conj(overlap(m, m)) / diag;
    }
  }
  EigenFrameSeries frames{grid, std::move(energies), std::move(raw_vectors), 0.0,
                          FrameGauge::PhaseContinuous};
  frames.min_gap = detail::series_min_gap(frames.energies);
  return frames;
}

/// Wraps externally supplied eigenpairs without touching their phases.
inline EigenFrameSeries frames_from_eigenpairs(const TimeGrid& grid,
                                               std::vector<RealVector> energies,
                                               std::vector<Matrix> vectors) {
  detail::check_series_shape(grid, energies, vectors);
  EigenFrameSeries frames{grid, std::move(energies), std::move(vectors), 0.0, FrameGauge::Supplied};
  frames.min_gap = detail::series_min_gap(frames.energies);
  return frames;
}

template <HamiltonianSource Model>
EigenFrameSeries track_frames(const Model& model, const TimeGrid& grid,
                              const SpectralOptions& options = {}) {
  const std::size_t count = grid.nodes();
  std::vector<RealVector> energies(count);
  std::vector<Matrix> vectors(count);
  detail::parallel_for(
      count,
      [&](std::size_t k) {
        Eigensystem eig = hermitian_eig(Matrix(model.evaluate(grid.time(k))), options.eig);
        energies[k] = std::move(eig.values);
        vectors[k] = std::move(eig.vectors);
      },
      4096);
  return gauge_fix(grid, std::move(energies), std::move(vectors), options);
}

/// Finite-difference connection <E_n(t_k)|dE_m/dt(t_k)>: central differences
/// inside; at the ends one-sided stencils, third order when four nodes exist
/// (a second-order end stencil has twice the central error and dominates the
/// maximum ratio).
inline std::vector<Matrix> connection_matrices(const EigenFrameSeries& frames) {
  const std::size_t count = frames.nodes();
  detail::require(count >= 3, ErrorCode::InvalidArgument,
                  "derivative couplings need at least three grid nodes");
  const double h = frames.grid.dt();
  const auto& v = frames.vectors;
  const std::size_t last = count - 1;
  std::vector<Matrix> connection(count);
  for (std::size_t k = 0; k < count; ++k) {
    Matrix derivative;
    if (k == 0 && count >= 4) {
      derivative = (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h);
    } else if (k == last && count >= 4) {
      derivative = (11.0 * v[k] - 18.0 * v[k - 1] + 9.0 * v[k - 2] - 2.0 * v[k - 3]) / (6.0 * h);
    } else if (k == 0) {
      derivative = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    } else if (k == last) {
      derivative = (3.0 * v[k] - 4.0 * v[k - 1] + v[k - 2]) / (2.0 * h);
    } else {
      derivative = (v[k + 1] - v[k - 1]) / (2.0 * h);
    }
    connection[k] = v[k].adjoint() * derivative;
  }
  return connection;
}

struct PairSeries {
  std::size_t n = 0;  // zero-based level indices
  std::size_t m = 0;
  std::vector<double> ratio;
};

struct ConditionReport {
  TimeGrid grid{0.0, 1.0, 1};
  std::vector<PairSeries> pairs;  // every ordered pair n != m
  std::vector<double> node_max;   // max over pairs at each node
  double max_ratio = 0.0;
  std::size_t arg_n = 0;
  std::size_t arg_m = 0;
  std::size_t arg_node = 0;

  double arg_time() const { return grid.time(arg_node); }

  const PairSeries* find(std::size_t n, std::size_t m) const {
    for (const auto& p : pairs)
      if (p.n == n && p.m == m) return &p;
    return nullptr;
  }
};

/// g_nm(t) = |<E_n|dE_m/dt>| / |E_n - E_m| for all ordered pairs. The
/// connection estimate is projected onto its anti-Hermitian part, which the
/// exact connection always is, so g_nm = g_mn holds to roundoff.
inline ConditionReport coupling_ratios(const EigenFrameSeries& frames) {
  const std::vector<Matrix> connection = connection_matrices(frames);
  const auto n_levels = static_cast<std::size_t>(frames.dimension());
  const std::size_t count = frames.nodes();

  ConditionReport report;
  report.grid = frames.grid;
  report.node_max.assign(count, 0.0);
  for (std::size_t n = 0; n < n_levels; ++n)
    for (std::size_t m = 0; m < n_levels; ++m)
      if (n != m) report.pairs.push_back({n, m, std::vector<double>(count, 0.0)});
  if (!report.pairs.empty()) {
    report.arg_n = report.pairs.front().n;
    report.arg_m = report.pairs.front().m;
  }

  for (std::size_t k = 0; k < count; ++k) {
    const Matrix anti = 0.5 * (connection[k] - connection[k].adjoint());
    const RealVector& e = frames.energies[k];
    for (auto& pair : report.pairs) {
      const auto n = static_cast<Index>(pair.n);
      const auto m = static_cast<Index>(pair.m);
      const double value = std::abs(anti(n, m)) / std::abs(e(n) - e(m));
      pair.ratio[k] = value;
      if (value > report.node_max[k]) report.node_max[k] = value;
      if (value > report.max_ratio) {
        report.max_ratio = value;
        report.arg_n = pair.n;
        report.arg_m = pair.m;
        report.arg_node = k;
      }
    }
  }
  return report;
}

}  // namespace adiabatic
