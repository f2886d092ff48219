#include "emm/sym_eigen.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace emm {

EigenConvergenceError::EigenConvergenceError(int sweeps, double off_diagonal_norm)
    : std::runtime_error("sym_eigen: no convergence after " + std::to_string(sweeps) +
                         " sweeps, off-diagonal norm " + std::to_string(off_diagonal_norm)),
      sweeps_(sweeps),
      off_norm_(off_diagonal_norm) {}

namespace {

// Applies the rotation (g, h) -> (g - s(h + g tau), h + s(g - h tau)) in place.
struct Rotator {
  BigReal s, tau, g, h, tmp;

  explicit Rotator(PrecisionBits prec) : s(prec), tau(prec), g(prec), h(prec), tmp(prec) {}

  void operator()(BigReal& x, BigReal& y) {
    g = x;
    h = y;
    tmp = h;
    tmp.add_product(g, tau);
    x.sub_product(s, tmp);
    tmp = g;
    tmp.sub_product(h, tau);
    y.add_product(s, tmp);
  }
};

}  // namespace

std::vector<EigenPair> sym_eigen(const SymMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) throw std::invalid_argument("sym_eigen: empty matrix");
  const PrecisionBits prec = m.precision();

  // Working copy, upper triangle used; v accumulates rotations (columns are eigenvectors).
  std::vector<BigReal> a(n * n, BigReal(prec));
  std::vector<BigReal> v(n * n, BigReal(prec));
  BigReal frob2(prec);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = m(i, j);
      frob2.add_product(m(i, j), m(i, j));
    }
    v[i * n + i] = BigReal(1L, prec);
  }
  auto A = [&](std::size_t i, std::size_t j) -> BigReal& { return a[i * n + j]; };
  auto V = [&](std::size_t i, std::size_t j) -> BigReal& { return v[i * n + j]; };

  // Converged once the off-diagonal mass is below the working epsilon relative to ||m||_F.
  const BigReal stop2 = ldexp(frob2, -2 * prec.bits);

  Rotator rot(prec);
  BigReal theta(prec), t(prec), c(prec), apq(prec), off2(prec);
  int sweep = 0;
  for (;; ++sweep) {
    off2 = BigReal(prec);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off2.add_product(A(p, q), A(p, q));
    }
    if (off2 <= stop2) break;
    if (sweep >= kJacobiSweepCap) {
      throw EigenConvergenceError(sweep, sqrt(off2).to_double());
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (A(p, q).is_zero()) continue;
        apq = A(p, q);
        // Negligible relative to both diagonal entries: drop it.
        const BigReal scaled = ldexp(abs(apq), prec.bits + 2);
        if (sweep > 3 && scaled < abs(A(p, p)) && scaled < abs(A(q, q))) {
          A(p, q) = BigReal(prec);
          continue;
        }
        theta = (A(q, q) - A(p, p)) / (2L * apq);
        t = BigReal(1L, prec) / (abs(theta) + sqrt(BigReal(1L, prec) + theta * theta));
        if (theta.sign() < 0) t = -t;
        c = BigReal(1L, prec) / sqrt(BigReal(1L, prec) + t * t);
        rot.s = t * c;
        rot.tau = rot.s / (BigReal(1L, prec) + c);
        A(p, p).sub_product(t, apq);
        A(q, q).add_product(t, apq);
        A(p, q) = BigReal(prec);
        for (std::size_t j = 0; j < p; ++j) rot(A(j, p), A(j, q));
        for (std::size_t j = p + 1; j < q; ++j) rot(A(p, j), A(j, q));
        for (std::size_t j = q + 1; j < n; ++j) rot(A(p, j), A(q, j));
        for (std::size_t j = 0; j < n; ++j) rot(V(j, p), V(j, q));
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return A(i, i) < A(j, j); });

  std::vector<EigenPair> out;
  out.reserve(n);
  for (std::size_t k : order) {
    EigenPair pair{A(k, k), std::vector<BigReal>(n, BigReal(prec))};
    for (std::size_t i = 0; i < n; ++i) pair.vector[i] = V(i, k);
    out.push_back(std::move(pair));
  }
  return out;
}

EigenPair min_eigenpair(const SymMatrix& m) { return sym_eigen(m).front(); }

std::size_t positive_definite_prefix(const SymMatrix& m, const BigReal& shift) {
  const std::size_t n = m.dim();
  const PrecisionBits prec = m.precision();
  // Row-wise LDL^T: l[i][j] for j < i, d[i] pivots.
  std::vector<BigReal> l(n * n, BigReal(prec));
  std::vector<BigReal> d(n, BigReal(prec));
  BigReal acc(prec), lij(prec);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      acc = m(i, j);
      for (std::size_t k = 0; k < j; ++k) {
        lij = l[i * n + k] * d[k];
        acc.sub_product(lij, l[j * n + k]);
      }
      l[i * n + j] = acc / d[j];
    }
    acc = m(i, i) - shift;
    for (std::size_t k = 0; k < i; ++k) {
      lij = l[i * n + k] * d[k];
      acc.sub_product(lij, l[i * n + k]);
    }
    if (acc.sign() <= 0) return i;
    d[i] = acc;
  }
  return n;
}

}  // namespace emm
