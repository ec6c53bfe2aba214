#include <random>

#include "test_support.hpp"

namespace adiabatic {
namespace {

using testing::kPi;

TEST(ClosedForm, StartsInTheLowerEigenstate) {
  const SpinHalfParams p{1.0, 0.5, kPi / 3};
  const ClosedFormCoefficients c = closed_form_coefficients(p, 0.0);
  EXPECT_EQ(c.a, Complex(1.0));
  EXPECT_EQ(c.b, Complex(0.0));
  EXPECT_LE((closed_form_state(p, 0.0) - spin_half_eigensystem(p, 0.0).state1).norm(), 1e-16);
}

TEST(ClosedForm, MatchesTheExplicitComponents) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> w(0.1, 20.0), th(0.05, 3.0), t(0.0, 40.0);
  for (int i = 0; i < 200; ++i) {
    const SpinHalfParams p{w(rng), w(rng), th(rng)};
    const double time = t(rng);
    EXPECT_LE((closed_form_state(p, time) -
               testing::explicit_spin_half_state(p.omega0, p.omega, p.theta, time))
                  .norm(),
              1e-12);
  }
}

TEST(ClosedForm, NormalizationIdentity) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> w(0.01, 100.0), th(1e-3, kPi - 1e-3), t(0.0, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const ClosedFormCoefficients c = closed_form_coefficients({w(rng), w(rng), th(rng)}, t(rng));
    ASSERT_NEAR(std::norm(c.a) + std::norm(c.b), 1.0, 1e-12);
  }
}

TEST(ClosedForm, ExcitedAmplitudePeak) {
  const SpinHalfParams p{1.0, 1.0, kPi / 2};
  EXPECT_NEAR(max_excited_amplitude(p), 1 / std::sqrt(2.0), 1e-15);
  const double t_peak = kPi / p.omega_bar();
  EXPECT_NEAR(std::abs(closed_form_coefficients(p, t_peak).b), max_excited_amplitude(p), 1e-15);
  const SpinHalfParams q{2.0, 0.3, 0.7};
  double dense_max = 0.0;
  for (int i = 0; i <= 200000; ++i)
    dense_max = std::max(dense_max, std::abs(closed_form_coefficients(q, i * 1e-4).b));
  EXPECT_NEAR(dense_max, max_excited_amplitude(q), 1e-9);
}

TEST(ClosedForm, SolvesTheSchrodingerEquation) {
  const SpinHalfParams p{1.5, 0.6, 1.0};
  auto residual = [&](double t, double h) {
    const Vector d = (closed_form_state(p, t + h) - closed_form_state(p, t - h)) / (2 * h);
    return (kI * d - spin_half_hamiltonian(p, t) * closed_form_state(p, t)).norm();
  };
  for (double t : {0.3, 2.0, 7.7}) {
    const double r1 = residual(t, 1e-3), r2 = residual(t, 5e-4);
    EXPECT_LE(r1, 1e-6);
    EXPECT_NEAR(r1 / r2, 4.0, 0.1);
  }
}

TEST(ExactConditionRatio, MatchesSymbolicOracle) {
  for (const SpinHalfParams& p : {SpinHalfParams{1.0, 10.0, 0.06}, SpinHalfParams{100.0, 1.0, 1.0}})
    EXPECT_NEAR(exact_condition_ratio(p), testing::symbolic_spin_half_ratio(p.omega0, p.omega, p.theta),
                1e-15);
}

TEST(ComponentSplit, SumsToTheState) {
  const SpinHalfParams p{0.7, 1.3, 0.9};
  for (double t : {0.0, 0.4, 3.0}) {
    const ComponentSplit s = component_split(p, t);
    const Vector psi = closed_form_state(p, t);
    for (int i = 0; i < 2; ++i) EXPECT_LE(std::abs(s.a_part[i] + s.b_part[i] - psi(i)), 1e-15);
  }
  const ComponentSplit start = component_split(p, 0.0);
  EXPECT_EQ(start.ratio[0], 0.0);
  EXPECT_EQ(start.ratio[1], 0.0);
}

TEST(ComponentSplit, SmallAngleFastField) {
  const SpinHalfParams p{0.1, 1.0, 0.06};
  const ComponentSplit s = component_split(p, kPi / p.omega_bar());
  EXPECT_GE(s.ratio[0], 0.5);
  EXPECT_LE(s.ratio[1], 0.1);
}

TEST(ComponentSplit, GuardsVanishingAdiabaticPart) {
  // w0 = w cos(th) makes a(t) vanish at wb t = pi.
  const SpinHalfParams p{1.0, 2.0, kPi / 3};
  const ComponentSplit s = component_split(p, kPi / p.omega_bar());
  EXPECT_TRUE(s.guarded[0]);
  EXPECT_TRUE(s.guarded[1]);
  EXPECT_TRUE(std::isinf(s.ratio[0]));
}

TEST(VerifyAgainstIntegrator, DefaultGrid) {
  const SpinHalfParams p{1.0, 0.5, kPi / 3};
  EXPECT_LE(verify_against_integrator(p, TimeGrid(0.0, 4 * kPi / p.omega_bar(),
                                                  default_step_count(p, 4 * kPi / p.omega_bar()))),
            1e-6);
}

TEST(VerifyAgainstIntegrator, DoublingTheStepCostsSixteenfold) {
  const SpinHalfParams p{1.0, 0.5, kPi / 3};
  const double horizon = 4 * kPi / p.omega_bar();
  const double fine = verify_against_integrator(p, TimeGrid(0.0, horizon, 400));
  const double coarse = verify_against_integrator(p, TimeGrid(0.0, horizon, 200));
  EXPECT_GE(coarse / fine, 8.0);
  EXPECT_LE(coarse / fine, 32.0);
}

TEST(VerifyAgainstIntegrator, StationaryLimit) {
  // With the field frozen the lower eigenstate only picks up e^{i w0 t / 2}.
  const double w0 = 1.0, th = kPi / 3;
  const SpinHalfParams frozen{w0, 1e-3, th};
  const HamiltonianModel model(SampledGeneric::constant(spin_half_hamiltonian(frozen, 0.0)));
  const Vector e1 = spin_half_eigensystem(frozen, 0.0).state1;
  const TimeGrid grid(0.0, 10.0, 10000);
  const double dev = max_deviation(model, e1, grid, [&](double t) -> Vector {
    return std::exp(kI * (0.5 * w0 * t)) * e1;
  });
  EXPECT_LE(dev, 1e-8);
}

TEST(SpinHalfFrames, ClosedFormEnergies) {
  const EigenFrameSeries frames = spin_half_frames({4.0, 1.0, 1.0}, TimeGrid(0.0, 1.0, 4));
  EXPECT_EQ(frames.energies[2](0), -2.0);
  EXPECT_EQ(frames.energies[2](1), 2.0);
  EXPECT_EQ(frames.min_gap, 4.0);
}

}  // namespace
}  // namespace adiabatic
