// Two systems with the same coupling ratios: the spin-half model and its
// dual H_b = i dU_a^H/dt U_a. Only one of them evolves adiabatically.

#include <cstdio>
#include <iostream>
#include <numbers>

#include "adiabatic/adiabatic.hpp"

int main() {
  using namespace adiabatic;
  const SpinHalfParams p{100.0, 1.0, std::numbers::pi / 4};
  const double tau = 2.0 * std::numbers::pi / p.omega;
  const TimeGrid grid(0.0, tau, default_step_count(p, tau));
  DualPair pair = evaluate_pair(build_dual(HamiltonianModel(p), grid), 0);
  std::printf("finite-difference cross-check deviation: %.3g\n", pair.cross_check_deviation);
  std::cout << to_json(*pair.evaluation).dump(2) << '\n';
}
