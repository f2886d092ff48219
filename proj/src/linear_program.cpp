#include "emm/linear_program.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace emm {

void LinearProgram::validate() const {
  if (num_vars == 0) throw std::invalid_argument("LinearProgram: no variables");
  if (lower.size() != num_vars || upper.size() != num_vars) {
    throw std::invalid_argument("LinearProgram: box size does not match num_vars");
  }
  for (std::size_t k = 0; k < num_vars; ++k) {
    if (!lower[k].is_finite() || !upper[k].is_finite()) {
      throw std::invalid_argument("LinearProgram: box bounds must be finite");
    }
    if (!(lower[k] < upper[k])) throw std::invalid_argument("LinearProgram: empty box");
  }
  for (const auto& row : inequalities) {
    if (row.coeffs.size() != num_vars) {
      throw std::invalid_argument("LinearProgram: inequality width does not match num_vars");
    }
    if (!row.bound.is_finite()) throw std::invalid_argument("LinearProgram: non-finite bound");
    for (const auto& c : row.coeffs) {
      if (!c.is_finite()) throw std::invalid_argument("LinearProgram: non-finite coefficient");
    }
  }
}

ChebyshevCenterSolver::ChebyshevCenterSolver(std::vector<BigReal> lower, std::vector<BigReal> upper,
                                             PrecisionBits prec)
    : num_vars_(lower.size()), prec_(prec) {
  if (num_vars_ == 0 || upper.size() != num_vars_) {
    throw std::invalid_argument("ChebyshevCenterSolver: bad box");
  }
  const std::size_t d = num_vars_ + 1;
  // Box rows: -v_k + t <= -lower_k, then v_k + t <= upper_k.
  for (int side = 0; side < 2; ++side) {
    for (std::size_t k = 0; k < num_vars_; ++k) {
      Row r{std::vector<BigReal>(d, BigReal(prec_)), BigReal(prec_), -1};
      r.g[k] = BigReal(side == 0 ? -1L : 1L, prec_);
      r.g[num_vars_] = BigReal(1L, prec_);
      r.h = side == 0 ? -lower[k] : upper[k];
      r.h.set_precision(prec_);
      rows_.push_back(std::move(r));
    }
  }
  // Dual-feasible start: every lower face plus the upper face of the narrowest coordinate.
  std::size_t narrow = 0;
  for (std::size_t k = 1; k < num_vars_; ++k) {
    if (upper[k] - lower[k] < upper[narrow] - lower[narrow]) narrow = k;
  }
  for (std::size_t k = 0; k < num_vars_; ++k) basis_.push_back(k);
  basis_.push_back(num_vars_ + narrow);
}

void ChebyshevCenterSolver::add(const LinearInequality& row) {
  if (row.coeffs.size() != num_vars_) {
    throw std::invalid_argument("ChebyshevCenterSolver::add: width mismatch");
  }
  BigReal norm2(prec_);
  for (const auto& c : row.coeffs) norm2.add_product(c, c);
  const long index = static_cast<long>(num_user_rows_++);
  if (norm2.is_zero()) {
    // 0 < b: either vacuous or unsatisfiable everywhere.
    if (row.bound.sign() <= 0) trivially_empty_ = true;
    return;
  }
  const BigReal norm = sqrt(norm2);
  Row r{std::vector<BigReal>(num_vars_ + 1, BigReal(prec_)), row.bound / norm, index};
  r.h.set_precision(prec_);
  for (std::size_t k = 0; k < num_vars_; ++k) {
    r.g[k] = row.coeffs[k] / norm;
    r.g[k].set_precision(prec_);
  }
  r.g[num_vars_] = BigReal(1L, prec_);
  rows_.push_back(std::move(r));
}

std::vector<BigReal> ChebyshevCenterSolver::solve_basis(bool transpose,
                                                        const std::vector<BigReal>& rhs) const {
  const std::size_t d = basis_.size();
  std::vector<std::vector<BigReal>> m(d, std::vector<BigReal>(d + 1, BigReal(prec_)));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      m[i][j] = transpose ? rows_[basis_[j]].g[i] : rows_[basis_[i]].g[j];
    }
    m[i][d] = rhs[i];
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < d; ++i) {
      if (abs(m[i][col]) > abs(m[piv][col])) piv = i;
    }
    if (m[piv][col].is_zero()) throw std::runtime_error("ChebyshevCenterSolver: singular basis");
    std::swap(m[col], m[piv]);
    for (std::size_t i = col + 1; i < d; ++i) {
      if (m[i][col].is_zero()) continue;
      const BigReal f = m[i][col] / m[col][col];
      for (std::size_t j = col; j <= d; ++j) m[i][j].sub_product(f, m[col][j]);
    }
  }
  std::vector<BigReal> x(d, BigReal(prec_));
  for (std::size_t i = d; i-- > 0;) {
    BigReal acc = m[i][d];
    for (std::size_t j = i + 1; j < d; ++j) acc.sub_product(m[i][j], x[j]);
    x[i] = acc / m[i][i];
  }
  return x;
}

BigReal ChebyshevCenterSolver::violation(const Row& r, const std::vector<BigReal>& x) const {
  BigReal v = -r.h;
  for (std::size_t k = 0; k < x.size(); ++k) v.add_product(r.g[k], x[k]);
  return v;
}

ChebyshevCenter ChebyshevCenterSolver::solve() {
  const std::size_t d = num_vars_ + 1;
  const BigReal feas_tol = pow2(-(prec_.bits - 12), prec_);
  const BigReal piv_tol = pow2(-(prec_.bits - 12), prec_);
  std::vector<BigReal> c(d, BigReal(prec_));
  c[num_vars_] = BigReal(1L, prec_);

  const std::size_t cap = 200 + 50 * rows_.size();
  int degenerate_run = 0;
  for (std::size_t iter = 0;; ++iter) {
    if (iter > cap) throw std::runtime_error("ChebyshevCenterSolver: pivot cap exceeded");
    std::vector<BigReal> hb(d, BigReal(prec_));
    for (std::size_t i = 0; i < d; ++i) hb[i] = rows_[basis_[i]].h;
    const std::vector<BigReal> x = solve_basis(false, hb);
    const bool bland = degenerate_run > 50;

    // Entering row: most violated (or lowest index under Bland's rule).
    std::optional<std::size_t> enter;
    BigReal worst(prec_);
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (std::find(basis_.begin(), basis_.end(), r) != basis_.end()) continue;
      const BigReal viol = violation(rows_[r], x);
      if (viol <= feas_tol) continue;
      if (bland) {
        enter = r;
        break;
      }
      if (!enter || viol > worst) {
        enter = r;
        worst = viol;
      }
    }

    if (!enter) {
      ChebyshevCenter out{std::vector<BigReal>(x.begin(), x.begin() + static_cast<long>(num_vars_)),
                          x[num_vars_],
                          {}};
      if (trivially_empty_) {
        mpfr_set_inf(out.slack.raw(), -1);
      }
      const std::vector<BigReal> y = solve_basis(true, c);
      for (std::size_t i = 0; i < d; ++i) {
        const auto& row = rows_[basis_[i]];
        if (row.user_index >= 0 && y[i] > piv_tol) {
          out.active_inequalities.push_back(static_cast<std::size_t>(row.user_index));
        }
      }
      std::sort(out.active_inequalities.begin(), out.active_inequalities.end());
      return out;
    }

    const std::vector<BigReal> y = solve_basis(true, c);
    const std::vector<BigReal> w = solve_basis(true, rows_[*enter].g);
    std::optional<std::size_t> leave;
    BigReal best_ratio(prec_);
    for (std::size_t k = 0; k < d; ++k) {
      if (w[k] <= piv_tol) continue;
      const BigReal ratio = max(y[k], BigReal(prec_)) / w[k];
      if (!leave || ratio < best_ratio ||
          (ratio == best_ratio && basis_[k] < basis_[*leave])) {
        leave = k;
        best_ratio = ratio;
      }
    }
    if (!leave) {
      // Dual unbounded: cannot happen while the box rows are present.
      throw std::logic_error("ChebyshevCenterSolver: dual ray found");
    }
    degenerate_run = best_ratio.is_zero() ? degenerate_run + 1 : 0;
    basis_[*leave] = *enter;
  }
}

std::optional<ChebyshevCenter> lp_chebyshev_center(const LinearProgram& lp, const BigReal& eps_strict) {
  lp.validate();
  ChebyshevCenterSolver solver(lp.lower, lp.upper, eps_strict.precision());
  for (const auto& row : lp.inequalities) solver.add(row);
  ChebyshevCenter center = solver.solve();
  if (!(center.slack >= eps_strict)) return std::nullopt;
  return center;
}

}  // namespace emm
