#pragma once

#include "emm/big_real.hpp"
#include "emm/sym_matrix.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace emm {

struct EigenPair {
  BigReal value;
  std::vector<BigReal> vector;  // unit norm
};

/// Raised when the Jacobi sweeps hit their cap; carries the remaining off-diagonal norm.
class EigenConvergenceError : public std::runtime_error {
 public:
  EigenConvergenceError(int sweeps, double off_diagonal_norm);
  int sweeps() const { return sweeps_; }
  double off_diagonal_norm() const { return off_norm_; }

 private:
  int sweeps_;
  double off_norm_;
};

inline constexpr int kJacobiSweepCap = 50;

/// Full eigen-decomposition by cyclic Jacobi rotations, eigenvalues ascending.
std::vector<EigenPair> sym_eigen(const SymMatrix& m);

/// Smallest eigenpair (same sweep, first entry of sym_eigen).
EigenPair min_eigenpair(const SymMatrix& m);

/// Number k of leading principal blocks of (m - shift*I) that are positive definite,
/// found by an LDL^T sweep that stops at the first non-positive pivot. k == dim means
/// m - shift*I is positive definite, i.e. every eigenvalue of m exceeds shift.
std::size_t positive_definite_prefix(const SymMatrix& m, const BigReal& shift);

}  // namespace emm
