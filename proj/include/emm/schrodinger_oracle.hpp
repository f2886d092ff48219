#pragma once

#include "emm/big_real.hpp"

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace emm {

struct OracleSettings {
  PrecisionBits precision{128};
  double half_length = 8.0;  // L
  double step = 1e-3;        // h; L / h must be an even integer
  /// Convergence: |psi(L)| <= match_tolerance * max |psi| on the grid.
  double match_tolerance = 1e-10;
  int max_newton = 60;
  /// Residual evaluation skips x < residual_exclude (the x^-4 singularity) and points where
  /// S has fallen below residual_floor * max S (truncation noise near L).
  double residual_exclude = 0.25;
  double residual_floor = 1e-16;
};

struct ResidualStats {
  double max_relative = 0.0;
  double rms_relative = 0.0;
  std::size_t points = 0;
};

/// Solution of -psi'' - i x^3 psi = E psi on [0, L] with psi(0) = 1, psi'(0) = i beta.
struct OracleSolution {
  BigReal energy;
  BigReal beta;
  double half_length = 0.0;
  double step = 0.0;
  std::vector<BigReal> x;
  std::vector<BigReal> re;  // Re psi
  std::vector<BigReal> im;  // Im psi
  double end_mismatch = 0.0;  // |psi(L)| / max |psi|
  int newton_iterations = 0;
  ResidualStats residual;

  std::vector<BigReal> density() const;  // S = |psi|^2
};

class NewtonDivergence : public std::runtime_error {
 public:
  NewtonDivergence(const std::string& what, std::vector<std::pair<double, double>> trajectory)
      : std::runtime_error(what), trajectory_(std::move(trajectory)) {}
  /// (E, beta) after each iteration.
  const std::vector<std::pair<double, double>>& trajectory() const { return trajectory_; }

 private:
  std::vector<std::pair<double, double>> trajectory_;
};

/// Leading-order WKB estimate for level n, a starting guess for shoot_eigenvalue.
double wkb_energy(int level);

/// Damped Newton shooting on (E, beta) -> psi(L), RK4 with variational equations for the
/// Jacobian. Throws NewtonDivergence when max_newton iterations do not converge.
OracleSolution shoot_eigenvalue(const BigReal& initial_e, const BigReal& initial_beta,
                                const OracleSettings& settings = {});

/// Relative residual of x S'''' - 3 S''' + 4E x S'' - 12E S' - 4x^7 S = 0 (the fourth-order
/// equation for S = |psi|^2 multiplied through by x^4), using central differences on uniform
/// samples s[k] = S(x0 + k h). Each point is normalised by its largest term. Throws
/// std::invalid_argument with fewer than 9 samples.
ResidualStats positivity_residual(const BigReal& x0, const BigReal& h, const std::vector<BigReal>& s,
                                  const BigReal& energy, double exclude_below, double floor_fraction = 0.0);

ResidualStats residual_check(const OracleSolution& sol, const OracleSettings& settings = {});

struct ReferenceMoments {
  /// u_rho = 2 int_0^L x^(2 rho) S dx, scaled so that u_0 + u_1 + u_2 + u_3 = 1.
  std::vector<BigReal> u;
  /// Largest relative Simpson error estimate (step h against 2h).
  double quadrature_error = 0.0;
};

/// Simpson quadrature on the solution grid. Throws std::invalid_argument when count < 4 or
/// when the integrand at L is not negligible (relative tail above tail_tolerance).
ReferenceMoments reference_moments(const OracleSolution& sol, int count, double tail_tolerance = 1e-12);

/// Columns: x, Re psi, Im psi, S; one row per grid point, '#' header line.
void write_grid(std::ostream& out, const OracleSolution& sol, int digits = 17);

}  // namespace emm
