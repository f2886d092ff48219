#pragma once

// Exact rational evaluation of the -ix^3 moment recursions, used only as a test oracle.

#include <gmpxx.h>

#include <array>
#include <vector>

namespace emm::testing {

/// u_0..u_pmax from the Stieltjes recursion, exact.
inline std::vector<mpq_class> exact_stieltjes(const mpq_class& e, const std::array<mpq_class, 4>& seed, int p_max) {
  std::vector<mpq_class> u(seed.begin(), seed.end());
  for (int rho = 0; static_cast<int>(u.size()) <= p_max; ++rho) {
    mpq_class next = 4 * e * (2 * rho + 1) * (2 * rho + 5) * u[rho];
    if (rho >= 1) next += mpq_class((2 * rho + 5) * (2 * rho + 1) * (2 * rho) * (2 * rho - 1)) * u[rho - 1];
    u.push_back(next / 4);
  }
  return u;
}

/// mu_0..mu_pmax from the Hamburger recursion, exact.
inline std::vector<mpq_class> exact_hamburger(const mpq_class& e, const std::array<mpq_class, 7>& seed, int p_max) {
  std::vector<mpq_class> mu(seed.begin(), seed.end());
  for (int p = 0; static_cast<int>(mu.size()) <= p_max; ++p) {
    mpq_class next = 4 * e * p * (p + 4) * (p >= 1 ? mu[p - 1] : mpq_class(0));
    if (p >= 3) next += mpq_class((p + 4) * p * (p - 1) * (p - 2)) * mu[p - 3];
    mu.push_back(next / 4);
  }
  return mu;
}

}  // namespace emm::testing
