#pragma once

#include "emm/big_real.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace emm {

/// coeffs . v < bound
struct LinearInequality {
  std::vector<BigReal> coeffs;
  BigReal bound;
};

/// Open polytope: strict inequalities intersected with the open box lower < v < upper.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<LinearInequality> inequalities;
  std::vector<BigReal> lower;
  std::vector<BigReal> upper;

  /// Throws std::invalid_argument on inconsistent sizes, non-finite data or an empty box.
  void validate() const;
};

struct ChebyshevCenter {
  std::vector<BigReal> point;
  /// Minimum over all rows (box included) of the Euclidean distance to the row's hyperplane.
  BigReal slack;
  /// Indices into LinearProgram::inequalities with a positive dual weight at the optimum.
  std::vector<std::size_t> active_inequalities;
};

/// Incremental max-slack solver. Rows can be appended between solves; each solve
/// warm-starts the dual simplex from the previous optimal basis.
class ChebyshevCenterSolver {
 public:
  ChebyshevCenterSolver(std::vector<BigReal> lower, std::vector<BigReal> upper, PrecisionBits prec);

  void add(const LinearInequality& row);
  std::size_t num_inequalities() const { return num_user_rows_; }

  /// Optimal (point, slack); slack may be zero or negative when the polytope is empty.
  ChebyshevCenter solve();

 private:
  struct Row {
    std::vector<BigReal> g;  // (a/|a|, 1)
    BigReal h;               // b/|a|
    long user_index;         // -1 for box rows
  };

  std::vector<BigReal> solve_basis(bool transpose, const std::vector<BigReal>& rhs) const;
  BigReal violation(const Row& r, const std::vector<BigReal>& x) const;

  std::size_t num_vars_;
  PrecisionBits prec_;
  std::vector<Row> rows_;
  std::vector<std::size_t> basis_;
  std::size_t num_user_rows_ = 0;
  bool trivially_empty_ = false;
};

/// Chebyshev center of the open polytope, or std::nullopt (Infeasible) when the best
/// attainable slack does not reach eps_strict.
std::optional<ChebyshevCenter> lp_chebyshev_center(const LinearProgram& lp, const BigReal& eps_strict);

}  // namespace emm
