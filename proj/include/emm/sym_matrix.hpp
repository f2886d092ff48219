#pragma once

#include "emm/big_real.hpp"

#include <cstddef>
#include <vector>

namespace emm {

/// Dense symmetric matrix; writes go to both triangles so entries(i,j) == entries(j,i) exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(std::size_t dim, PrecisionBits prec);

  std::size_t dim() const { return dim_; }
  PrecisionBits precision() const { return prec_; }

  const BigReal& operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, const BigReal& value);

  /// max |m_ij|
  BigReal max_norm() const;
  BigReal trace() const;

  /// Leading principal (k x k) block.
  SymMatrix leading_block(std::size_t k) const;

  /// m * x
  std::vector<BigReal> apply(const std::vector<BigReal>& x) const;
  /// x^T m x
  BigReal quadratic_form(const std::vector<BigReal>& x) const;

  /// this += scale * other
  void add_scaled(const SymMatrix& other, const BigReal& scale);

 private:
  std::size_t dim_ = 0;
  PrecisionBits prec_{};
  std::vector<BigReal> entries_;
};

}  // namespace emm
