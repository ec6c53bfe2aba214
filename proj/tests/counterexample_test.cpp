#include <array>
#include <random>

#include "test_support.hpp"

namespace adiabatic {
namespace {

using testing::kPi;

TEST(BuildDual, ConstantHamiltonianNegates) {
  std::mt19937_64 rng(61);
  const Matrix h = testing::random_hermitian(rng, 3);
  const TimeGrid grid(0.0, 2.0, 2000);
  const DualPair pair = build_dual(HamiltonianModel(SampledGeneric::constant(h)), grid);
  for (double t : {0.0, 0.5, 1.0, 1.2345, 2.0}) {
    // U commutes with a constant H.
    EXPECT_LE(max_abs(pair.model_b.evaluate(t) + h), 1e-11);
  }
}

TEST(BuildDual, SpectrumIsNegated) {
  const SpinHalfParams p{100.0, 1.0, kPi / 4};
  const TimeGrid grid = spin_half_grid(p, 2 * kPi);
  const DualPair pair = build_dual(HamiltonianModel(p), grid);
  for (std::size_t k = 0; k < grid.nodes(); k += 997) {
    const Matrix hb = pair.model_b.evaluate(grid.time(k));
    EXPECT_LE(hermiticity_defect(hb), 1e-8);
    const Eigensystem eig = hermitian_eig(hb);
    EXPECT_NEAR(eig.values(0), -50.0, 1e-8);
    EXPECT_NEAR(eig.values(1), 50.0, 1e-8);
  }
}

TEST(BuildDual, DualPropagatorIsTheAdjoint) {
  // i dU_b/dt = H_b U_b with H_b = i dU_a^H/dt U_a is solved by U_b = U_a^H.
  const SpinHalfParams p{1.0, 1.0, kPi / 4};
  const TimeGrid grid(0.0, 2 * kPi, 200000);
  const DualPair pair = build_dual(HamiltonianModel(p), grid);
  const auto* dual = pair.model_b.get_if<DualOf>();
  ASSERT_NE(dual, nullptr);
  const Trajectory ub = accumulate_propagator(pair.model_b, grid);
  for (std::size_t k = 0; k < grid.nodes(); k += 10000)
    EXPECT_LE(max_abs(ub.propagators[k] - dual->propagators()[k].adjoint()), 1e-5);
}

TEST(BuildDual, OffNodeEvaluationIsSmooth) {
  const SpinHalfParams p{1.0, 1.0, kPi / 4};
  const TimeGrid grid(0.0, 1.0, 1000);
  const DualPair pair = build_dual(HamiltonianModel(p), grid);
  const double t = grid.time(400) + 0.5 * grid.dt();
  const Matrix mid = pair.model_b.evaluate(t);
  const Matrix avg = 0.5 * (pair.model_b.evaluate(grid.time(400)) + pair.model_b.evaluate(grid.time(401)));
  EXPECT_LE(max_abs(mid - avg), 10 * grid.dt() * grid.dt());
  EXPECT_ADIABATIC_ERROR(ErrorCode::TimeOutOfDomain, pair.model_b.evaluate(1.5));
}

TEST(BuildDual, CrossCheckCatchesInconsistentPropagators) {
  const SpinHalfParams p{1.0, 1.0, kPi / 4};
  const HamiltonianModel model(p);
  const TimeGrid grid(0.0, 1.0, 1000);
  std::vector<Matrix> u = accumulate_propagator(model, grid).propagators;
  EXPECT_LE(dual_cross_check(model, grid, u), 1e-4);
  u[500] = exp_minus_iH_dt(pauli_x(), 0.1) * u[500];
  EXPECT_ADIABATIC_ERROR(ErrorCode::CrossCheckFailed, dual_cross_check(model, grid, u));
  u.pop_back();
  EXPECT_ADIABATIC_ERROR(ErrorCode::GridMismatch, dual_cross_check(model, grid, u));
}

TEST(EvaluatePair, RotatingFieldCounterexample) {
  const SpinHalfParams p{100.0, 1.0, kPi / 4};
  const DualPair pair = evaluate_pair(build_dual(HamiltonianModel(p), spin_half_grid(p, 2 * kPi)), 0);
  ASSERT_TRUE(pair.evaluation.has_value());
  const PairEvaluation& e = *pair.evaluation;
  EXPECT_NEAR(e.ratio_a, testing::symbolic_spin_half_ratio(100.0, 1.0, kPi / 4), 1e-6);
  EXPECT_TRUE(e.ratios_agree);
  EXPECT_NEAR(e.ratio_b, e.ratio_a, 0.1 * e.ratio_a);
  EXPECT_TRUE(e.report_a.approximation_valid);
  EXPECT_FALSE(e.report_b.approximation_valid);
  EXPECT_TRUE(e.at_least_one_invalid);
  // The condition holds for b while its adiabatic approximation fails.
  EXPECT_TRUE(e.report_b.condition_satisfied);
}

TEST(EvaluatePair, NeverBothValid) {
  const std::array<double, 3> ratios{10.0, 50.0, 100.0};
  const std::array<double, 3> thetas{kPi / 6, kPi / 4, kPi / 3};
  int both_valid = 0;
  for (double r : ratios)
    for (double th : thetas) {
      const SpinHalfParams p{r, 1.0, th};
      const DualPair pair = evaluate_pair(build_dual(HamiltonianModel(p), spin_half_grid(p, 2 * kPi)), 0);
      if (!pair.evaluation->at_least_one_invalid) ++both_valid;
      EXPECT_TRUE(pair.evaluation->ratios_agree) << r << " " << th;
    }
  EXPECT_EQ(both_valid, 0);
}

TEST(EvaluatePair, LevelOutOfRange) {
  const SpinHalfParams p{1.0, 1.0, kPi / 4};
  const DualPair pair = build_dual(HamiltonianModel(p), TimeGrid(0.0, 1.0, 100));
  EXPECT_ADIABATIC_ERROR(ErrorCode::InvalidArgument, evaluate_pair(pair, 2));
}

}  // namespace
}  // namespace adiabatic
