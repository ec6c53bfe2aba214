#pragma once

// Dense complex linear algebra used throughout: Hermitian eigensolves,
// unitary step factors exp(-iH dt), and the uniform time grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "adiabatic/errors.hpp"

namespace adiabatic {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr Complex kI{0.0, 1.0};

/// Uniform discretization of [t_start, t_end] into `steps` intervals.
/// Node times are computed from the index, never by accumulation.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, std::size_t steps)
      : t_start_(t_start), t_end_(t_end), steps_(steps) {
    detail::require(std::isfinite(t_start) && std::isfinite(t_end), ErrorCode::DomainError,
                    "time grid bounds must be finite");
    detail::require(t_end > t_start, ErrorCode::DomainError, "time grid requires t_end > t_start");
    detail::require(steps >= 1, ErrorCode::DomainError, "time grid requires at least one step");
    dt_ = (t_end_ - t_start_) / static_cast<double>(steps_);
  }

  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t nodes() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return dt_; }
  double span() const noexcept { return t_end_ - t_start_; }

  double time(std::size_t k) const noexcept {
    return k == steps_ ? t_end_ : t_start_ + static_cast<double>(k) * dt_;
  }

  bool contains(double t, double slack = 1e-12) const noexcept {
    const double pad = slack * std::max(1.0, span());
    return t >= t_start_ - pad && t <= t_end_ + pad;
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double t_start_;
  double t_end_;
  std::size_t steps_;
  double dt_;
};

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

inline bool is_hermitian(const Matrix& m, double rel_tol = 1e-10) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= rel_tol * max_abs(m);
}

inline double unitarity_defect(const Matrix& u) {
  return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

/// Eigenvalues ascending; eigenvectors are the matching columns.
struct Eigensystem {
  RealVector values;
  Matrix vectors;

  Index dimension() const noexcept { return values.size(); }
  /// Smallest spacing between adjacent eigenvalues (infinity for N = 1).
  double min_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (Index i = 1; i < values.size(); ++i) gap = std::min(gap, values(i) - values(i - 1));
    return gap;
  }
};

struct EigOptions {
  double hermiticity_tol = 1e-10;
  /// Relative to the spectral range E_max - E_min.
  double degeneracy_tol = 1e-8;
  bool reject_degenerate = true;
};

/// Absolute gap below which a spectrum counts as degenerate.
inline double degeneracy_threshold(const RealVector& values, double scale, double rel_tol) {
  if (values.size() < 2) return 0.0;
  const double range = values(values.size() - 1) - values(0);
  // Floor for matrices proportional to the identity, where the range itself is roundoff.
  return std::max(rel_tol * range, 1e-12 * scale);
}

inline Eigensystem hermitian_eig(const Matrix& m, const EigOptions& options = {}) {
  detail::require(m.rows() == m.cols() && m.rows() > 0, ErrorCode::InvalidArgument,
                  "eigensolve requires a non-empty square matrix");
  detail::require(m.allFinite(), ErrorCode::InvalidArgument, "matrix has non-finite entries");
  const double scale = max_abs(m);
  const double defect = hermiticity_defect(m);
  detail::require(defect <= options.hermiticity_tol * scale, ErrorCode::HermiticityViolation,
                  "max|M - M^H| = " + std::to_string(defect) + " exceeds tolerance");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  detail::require(solver.info() == Eigen::Success, ErrorCode::InvalidArgument,
                  "eigensolver did not converge");
  Eigensystem result{solver.eigenvalues(), solver.eigenvectors()};

  if (options.reject_degenerate && result.dimension() > 1) {
    const double gap = result.min_gap();
    const double threshold = degeneracy_threshold(result.values, scale, options.degeneracy_tol);
    detail::require(gap > threshold, ErrorCode::DegenerateSpectrum,
                    "eigenvalue gap " + std::to_string(gap) + " at or below tolerance " +
                        std::to_string(threshold));
  }
  return result;
}

/// exp(-i H dt) assembled from the spectral decomposition of H.
inline Matrix exp_minus_iH_dt(const Matrix& h, double dt) {
  EigOptions options;
  options.reject_degenerate = false;
  const Eigensystem eig = hermitian_eig(h, options);
  Vector phases(eig.dimension());
  for (Index i = 0; i < eig.dimension(); ++i) phases(i) = std::exp(-kI * (eig.values(i) * dt));
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

}  // namespace adiabatic
