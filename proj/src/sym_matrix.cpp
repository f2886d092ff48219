#include "emm/sym_matrix.hpp"

#include <stdexcept>

namespace emm {

SymMatrix::SymMatrix(std::size_t dim, PrecisionBits prec)
    : dim_(dim), prec_(prec), entries_(dim * dim, BigReal(prec)) {}

void SymMatrix::set(std::size_t i, std::size_t j, const BigReal& value) {
  if (i >= dim_ || j >= dim_) throw std::out_of_range("SymMatrix::set");
  entries_[i * dim_ + j] = value;
  entries_[j * dim_ + i] = value;
}

BigReal SymMatrix::max_norm() const {
  BigReal best(prec_);
  for (const auto& e : entries_) {
    if (abs(e) > best) best = abs(e);
  }
  return best;
}

BigReal SymMatrix::trace() const {
  BigReal sum(prec_);
  for (std::size_t i = 0; i < dim_; ++i) sum += (*this)(i, i);
  return sum;
}

SymMatrix SymMatrix::leading_block(std::size_t k) const {
  if (k > dim_) throw std::out_of_range("SymMatrix::leading_block");
  SymMatrix out(k, prec_);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) out.set(i, j, (*this)(i, j));
  }
  return out;
}

std::vector<BigReal> SymMatrix::apply(const std::vector<BigReal>& x) const {
  if (x.size() != dim_) throw std::invalid_argument("SymMatrix::apply: size mismatch");
  std::vector<BigReal> y(dim_, BigReal(prec_));
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) y[i].add_product((*this)(i, j), x[j]);
  }
  return y;
}

BigReal SymMatrix::quadratic_form(const std::vector<BigReal>& x) const {
  const auto y = apply(x);
  BigReal sum(prec_);
  for (std::size_t i = 0; i < dim_; ++i) sum.add_product(x[i], y[i]);
  return sum;
}

void SymMatrix::add_scaled(const SymMatrix& other, const BigReal& scale) {
  if (other.dim_ != dim_) throw std::invalid_argument("SymMatrix::add_scaled: size mismatch");
  for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k].add_product(other.entries_[k], scale);
}

}  // namespace emm
