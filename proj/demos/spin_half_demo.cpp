// Fidelity alone can look excellent while the state does not follow the
// field: compare a fast-field run (w = 10 w0, small tilt) with a slow one.

#include <cstdio>
#include <initializer_list>

#include "adiabatic/adiabatic.hpp"

int main() {
  using namespace adiabatic;
  for (const SpinHalfParams p : {SpinHalfParams{1.0, 10.0, 0.06}, SpinHalfParams{100.0, 1.0, 0.06}}) {
    const Evolution run = evolve(HamiltonianModel(p), spin_half_grid(p));
    const AdiabaticReport& r = run.report;
    std::printf("w0=%g w=%g theta=%g\n", p.omega0, p.omega, p.theta);
    std::printf("  max coupling ratio   %.6f (closed form %.6f)\n", r.condition.max_ratio,
                exact_condition_ratio(p));
    std::printf("  min fidelity         %.6f\n", r.min_fidelity);
    std::printf("  Bloch rates          exact %.4f, reference %.4f (ratio %.2f)\n",
                r.rates->exact_rate, r.rates->reference_rate, r.rates->ratio());
    std::printf("  condition satisfied  %s\n", r.condition_satisfied ? "yes" : "no");
    std::printf("  approximation valid  %s\n", r.approximation_valid ? "yes" : "no");
  }
}
