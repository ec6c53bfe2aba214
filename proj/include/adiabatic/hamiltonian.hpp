#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <memory>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "adiabatic/numerics.hpp"

namespace adiabatic {

/// Anything that yields a Hermitian matrix of fixed dimension at a time t.
template <class H>
concept HamiltonianSource = requires(const H& h, double t) {
  { h.evaluate(t) } -> std::convertible_to<Matrix>;
  { h.dimension() } -> std::convertible_to<Index>;
};

/// Spin one-half in a field of strength omega0 precessing about z at rate omega,
/// tilted by theta from the rotation axis. Units with hbar = 1.
struct SpinHalfParams {
  double omega0 = 1.0;
  double omega = 1.0;
  double theta = std::numbers::pi / 2;

  void validate() const {
    detail::require(std::isfinite(omega0) && omega0 > 0.0, ErrorCode::DomainError,
                    "omega0 must be positive");
    detail::require(std::isfinite(omega) && omega > 0.0, ErrorCode::DomainError,
                    "omega must be positive");
    detail::require(std::isfinite(theta) && theta > 0.0 && theta < std::numbers::pi,
                    ErrorCode::DomainError, "theta must lie in (0, pi)");
  }

  /// Oscillation frequency of the exact two-level coefficients.
  double omega_bar() const {
    return std::sqrt(omega0 * omega0 + omega * omega - 2.0 * omega0 * omega * std::cos(theta));
  }
};

inline Matrix spin_half_hamiltonian(const SpinHalfParams& p, double t) {
  const double s = std::sin(p.theta);
  const double c = std::cos(p.theta);
  const Complex off = 0.5 * p.omega0 * s * std::exp(-kI * (p.omega * t));
  Matrix h(2, 2);
  h << 0.5 * p.omega0 * c, off, std::conj(off), -0.5 * p.omega0 * c;
  return h;
}

struct SpinHalfRotating {
  SpinHalfParams params;

  Matrix evaluate(double t) const { return spin_half_hamiltonian(params, t); }
  Index dimension() const noexcept { return 2; }
};

/// Table of Hermitian matrices on strictly increasing times, interpolated
/// linearly entry by entry and re-Hermitized. A single-entry table is constant.
class SampledGeneric {
 public:
  SampledGeneric(std::vector<double> times, std::vector<Matrix> matrices)
      : times_(std::move(times)), matrices_(std::move(matrices)) {
    detail::require(!times_.empty(), ErrorCode::InvalidArgument, "sampled model needs samples");
    detail::require(times_.size() == matrices_.size(), ErrorCode::InvalidArgument,
                    "times and matrices differ in length");
    dim_ = matrices_.front().rows();
    detail::require(dim_ > 0, ErrorCode::InvalidArgument, "sampled matrices must be non-empty");
    for (std::size_t i = 0; i < times_.size(); ++i) {
      detail::require(std::isfinite(times_[i]), ErrorCode::InvalidArgument, "non-finite sample time");
      if (i > 0)
        detail::require(times_[i] > times_[i - 1], ErrorCode::InvalidArgument,
                        "sample times must be strictly increasing");
      const Matrix& m = matrices_[i];
      detail::require(m.rows() == dim_ && m.cols() == dim_, ErrorCode::InvalidArgument,
                      "sample " + std::to_string(i) + " has the wrong shape");
      detail::require(m.allFinite(), ErrorCode::InvalidArgument, "non-finite sample entry");
      detail::require(is_hermitian(m), ErrorCode::HermiticityViolation,
                      "sample " + std::to_string(i) + " is not Hermitian");
    }
  }

  /// The same matrix at every t.
  static SampledGeneric constant(const Matrix& h) { return SampledGeneric({0.0}, {h}); }

  Matrix evaluate(double t) const {
    if (times_.size() == 1) return matrices_.front();
    const double span = times_.back() - times_.front();
    const double pad = 1e-12 * std::max(1.0, span);
    if (!(t >= times_.front() - pad && t <= times_.back() + pad))
      throw Error(ErrorCode::TimeOutOfDomain,
                  "t = " + std::to_string(t) + " outside the sampled span");
    t = std::clamp(t, times_.front(), times_.back());
    auto upper = std::upper_bound(times_.begin(), times_.end(), t);
    if (upper == times_.end()) return matrices_.back();
    const std::size_t hi = static_cast<std::size_t>(upper - times_.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return hermitian_part((1.0 - w) * matrices_[lo] + w * matrices_[hi]);
  }

  Index dimension() const noexcept { return dim_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<Matrix>& matrices() const noexcept { return matrices_; }

 private:
  std::vector<double> times_;
  std::vector<Matrix> matrices_;
  Index dim_ = 0;
};

class HamiltonianModel;

/// Companion of a reference model built from its propagator series U(t_k):
/// H_dual(t) = -U(t)^H H_ref(t) U(t), which equals i dU^H/dt U.
class DualOf {
 public:
  DualOf(std::shared_ptr<const HamiltonianModel> source, TimeGrid grid,
         std::shared_ptr<const std::vector<Matrix>> propagators);

  Matrix evaluate(double t) const;
  Index dimension() const noexcept;
  /// U_ref(t): stored at nodes, advanced by one midpoint sub-step in between.
  Matrix reference_propagator(double t) const;

  const HamiltonianModel& source() const noexcept { return *source_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const std::vector<Matrix>& propagators() const noexcept { return *propagators_; }

 private:
  std::shared_ptr<const HamiltonianModel> source_;
  TimeGrid grid_;
  std::shared_ptr<const std::vector<Matrix>> propagators_;
};

class HamiltonianModel {
 public:
  using Variant = std::variant<SpinHalfRotating, SampledGeneric, DualOf>;

  explicit HamiltonianModel(SpinHalfParams params) : variant_(SpinHalfRotating{params}) {
    params.validate();
  }
  explicit HamiltonianModel(SampledGeneric sampled) : variant_(std::move(sampled)) {}
  explicit HamiltonianModel(DualOf dual) : variant_(std::move(dual)) {}

  Matrix evaluate(double t) const {
    detail::require(std::isfinite(t), ErrorCode::TimeOutOfDomain, "non-finite time");
    return std::visit([t](const auto& m) { return Matrix(m.evaluate(t)); }, variant_);
  }

  Index dimension() const {
    return std::visit([](const auto& m) { return m.dimension(); }, variant_);
  }

  const Variant& variant() const noexcept { return variant_; }

  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&variant_);
  }

 private:
  Variant variant_;
};

inline DualOf::DualOf(std::shared_ptr<const HamiltonianModel> source, TimeGrid grid,
                      std::shared_ptr<const std::vector<Matrix>> propagators)
    : source_(std::move(source)), grid_(grid), propagators_(std::move(propagators)) {
  detail::require(source_ != nullptr && propagators_ != nullptr, ErrorCode::InvalidArgument,
                  "dual model needs a source and its propagators");
  detail::require(propagators_->size() == grid_.nodes(), ErrorCode::InvalidArgument,
                  "propagator series does not match the grid");
}

inline Index DualOf::dimension() const noexcept { return source_->dimension(); }

inline Matrix DualOf::reference_propagator(double t) const {
  if (!grid_.contains(t))
    throw Error(ErrorCode::TimeOutOfDomain,
                "t = " + std::to_string(t) + " outside the propagator grid");
  const double offset = std::clamp(t - grid_.t_start(), 0.0, grid_.span());
  const double pos = offset / grid_.dt();
  const double nearest = std::round(pos);
  const auto& u = *propagators_;
  if (std::abs(pos - nearest) <= 1e-9) return u[static_cast<std::size_t>(nearest)];
  const std::size_t k = std::min(static_cast<std::size_t>(std::floor(pos)), grid_.steps() - 1);
  const double s = t - grid_.time(k);
  return exp_minus_iH_dt(source_->evaluate(grid_.time(k) + 0.5 * s), s) * u[k];
}

inline Matrix DualOf::evaluate(double t) const {
  const Matrix u = reference_propagator(t);
  return -(u.adjoint() * source_->evaluate(t) * u);
}

/// Adapter turning a callable t -> Matrix into a HamiltonianSource.
template <class F>
  requires std::is_invocable_r_v<Matrix, const F&, double>
class FunctionModel {
 public:
  FunctionModel(Index dimension, F f) : dim_(dimension), f_(std::move(f)) {}

  Matrix evaluate(double t) const { return f_(t); }
  Index dimension() const noexcept { return dim_; }

 private:
  Index dim_;
  F f_;
};

/// Closed-form instantaneous eigenpairs of the spin-half model, ordered (E1, E2) = (-w0/2, +w0/2).
struct SpinHalfEigensystem {
  double e1;
  double e2;
  Vector state1;
  Vector state2;
};

inline SpinHalfEigensystem spin_half_eigensystem(const SpinHalfParams& p, double t) {
  p.validate();
  const double s = std::sin(0.5 * p.theta);
  const double c = std::cos(0.5 * p.theta);
  const Complex lower = std::exp(-kI * (0.5 * p.omega * t));
  const Complex upper = std::exp(kI * (0.5 * p.omega * t));
  Vector v1(2), v2(2);
  v1 << lower * s, -upper * c;
  v2 << lower * c, upper * s;
  return {-0.5 * p.omega0, 0.5 * p.omega0, std::move(v1), std::move(v2)};
}

}  // namespace adiabatic
