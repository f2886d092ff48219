#include "doctest.h"

#include "emm/big_real.hpp"
#include "emm/linear_program.hpp"
#include "emm/sym_eigen.hpp"
#include "emm/sym_matrix.hpp"

#include <random>

using namespace emm;

namespace {

const PrecisionBits P128{128};

BigReal R(double x, PrecisionBits p = P128) { return BigReal(x, p); }

SymMatrix random_sym(std::size_t n, std::mt19937_64& rng, PrecisionBits p) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  SymMatrix m(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) m.set(i, j, R(dist(rng), p));
  }
  return m;
}

}  // namespace

TEST_CASE("BigReal arithmetic keeps the wider precision") {
  const BigReal a(1L, PrecisionBits{64});
  const BigReal b(3L, PrecisionBits{256});
  const BigReal q = a / b;
  CHECK(q.precision().bits == 256);
  CHECK(abs(q * 3L - BigReal(1L, PrecisionBits{256})) < pow2(-250, PrecisionBits{256}));
}

TEST_CASE("BigReal parses and prints decimal strings losslessly") {
  const BigReal x("1.156267071988113240", P128);
  const BigReal y(x.to_string(), P128);
  CHECK(x == y);
  CHECK(x.to_fixed(5, MPFR_RNDD) == "1.15626");
  CHECK(x.to_fixed(5, MPFR_RNDU) == "1.15627");
  CHECK_THROWS_AS(BigReal("1.2.3", P128), std::invalid_argument);
}

TEST_CASE("sym_eigen: identity 2x2") {
  SymMatrix m(2, P128);
  m.set(0, 0, R(1));
  m.set(1, 1, R(1));
  const auto e = sym_eigen(m);
  REQUIRE(e.size() == 2);
  CHECK(e[0].value == 1L);
  CHECK(e[1].value == 1L);
}

TEST_CASE("sym_eigen: diagonal matrix gives axis-aligned vectors") {
  SymMatrix m(2, P128);
  m.set(0, 0, R(3));
  m.set(1, 1, R(-2));
  const auto e = sym_eigen(m);
  CHECK(e[0].value == -2L);
  CHECK(e[1].value == 3L);
  CHECK(abs(e[0].vector[1]) == 1L);
  CHECK(e[0].vector[0].is_zero());
  CHECK(abs(e[1].vector[0]) == 1L);
}

TEST_CASE("sym_eigen: [[2,1],[1,2]]") {
  SymMatrix m(2, P128);
  m.set(0, 0, R(2));
  m.set(1, 1, R(2));
  m.set(0, 1, R(1));
  const auto e = sym_eigen(m);
  const BigReal tol = pow2(-120, P128);
  CHECK(abs(e[0].value - R(1)) < tol);
  CHECK(abs(e[1].value - R(3)) < tol);
  const BigReal inv_sqrt2 = BigReal(1L, P128) / sqrt(R(2));
  // (1,-1)/sqrt2 for eigenvalue 1, (1,1)/sqrt2 for 3, up to sign.
  CHECK(abs(abs(e[0].vector[0]) - inv_sqrt2) < tol);
  CHECK(abs(e[0].vector[0] + e[0].vector[1]) < tol);
  CHECK(abs(e[1].vector[0] - e[1].vector[1]) < tol);
}

TEST_CASE("sym_eigen: trace, orthonormality and reconstruction on random matrices") {
  std::mt19937_64 rng(7);
  for (PrecisionBits p : {PrecisionBits{128}, PrecisionBits{256}}) {
    for (std::size_t n : {1u, 3u, 8u, 16u}) {
      const SymMatrix m = random_sym(n, rng, p);
      const auto e = sym_eigen(m);
      const BigReal half_eps = pow2(-p.bits / 2, p);

      BigReal sum(p);
      for (const auto& pair : e) sum += pair.value;
      CHECK(abs(sum - m.trace()) <= half_eps * max(BigReal(1L, p), abs(m.trace())));

      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
          BigReal dot(p);
          for (std::size_t i = 0; i < n; ++i) dot.add_product(e[a].vector[i], e[b].vector[i]);
          CHECK(abs(dot - BigReal(a == b ? 1L : 0L, p)) <= half_eps);
        }
      }

      const BigReal bound = half_eps * static_cast<long>(n) * m.max_norm();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          BigReal r = m(i, j);
          for (const auto& pair : e) r.sub_product(pair.value, pair.vector[i] * pair.vector[j]);
          CHECK(abs(r) <= bound);
        }
      }
      for (std::size_t k = 1; k < n; ++k) CHECK(e[k - 1].value <= e[k].value);
    }
  }
}

TEST_CASE("sym_eigen is bit-for-bit deterministic") {
  std::mt19937_64 rng(11);
  const SymMatrix m = random_sym(9, rng, P128);
  const auto a = sym_eigen(m);
  const auto b = sym_eigen(m);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].value == b[k].value);
    for (std::size_t i = 0; i < a[k].vector.size(); ++i) CHECK(a[k].vector[i] == b[k].vector[i]);
  }
}

TEST_CASE("sym_eigen rejects an empty matrix") { CHECK_THROWS_AS(sym_eigen(SymMatrix(0, P128)), std::invalid_argument); }

TEST_CASE("positive_definite_prefix agrees with the minimum eigenvalue") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix m = random_sym(6, rng, P128);
    const auto shift = R(-0.5 + 0.05 * trial);
    const std::size_t k = positive_definite_prefix(m, shift);
    const bool pd = min_eigenpair(m).value > shift;
    CHECK((k == m.dim()) == pd);
    if (k < m.dim()) {
      // Block k+1 fails, every smaller block passes.
      CHECK(min_eigenpair(m.leading_block(k + 1)).value <= shift);
      if (k > 0) CHECK(min_eigenpair(m.leading_block(k)).value > shift);
    }
  }
}

namespace {

LinearProgram unit_box(std::size_t n) {
  LinearProgram lp;
  lp.num_vars = n;
  lp.lower.assign(n, R(0));
  lp.upper.assign(n, R(1));
  return lp;
}

}  // namespace

TEST_CASE("lp_chebyshev_center: symmetric box") {
  const auto c = lp_chebyshev_center(unit_box(3), pow2(-32, P128));
  REQUIRE(c.has_value());
  for (const auto& v : c->point) CHECK(v == R(0.5));
  CHECK(c->slack == R(0.5));
}

TEST_CASE("lp_chebyshev_center: inequality contradicting the box is infeasible") {
  LinearProgram lp = unit_box(3);
  lp.inequalities.push_back({{R(1), R(1), R(1)}, R(0)});
  CHECK_FALSE(lp_chebyshev_center(lp, pow2(-32, P128)).has_value());
}

TEST_CASE("lp_chebyshev_center: one-dimensional cut") {
  LinearProgram lp = unit_box(1);
  lp.inequalities.push_back({{R(1)}, R(0.5)});
  const auto c = lp_chebyshev_center(lp, pow2(-32, P128));
  REQUIRE(c.has_value());
  CHECK(c->point[0] == R(0.25));
  CHECK(c->slack == R(0.25));
  CHECK(c->active_inequalities == std::vector<std::size_t>{0});
}

TEST_CASE("lp_chebyshev_center: malformed programs are rejected") {
  LinearProgram lp = unit_box(2);
  lp.inequalities.push_back({{R(1)}, R(0.5)});
  CHECK_THROWS_AS(lp_chebyshev_center(lp, pow2(-32, P128)), std::invalid_argument);
  LinearProgram flat = unit_box(2);
  flat.upper[1] = R(0);
  CHECK_THROWS_AS(lp_chebyshev_center(flat, pow2(-32, P128)), std::invalid_argument);
}

TEST_CASE("lp_chebyshev_center: random cuts keep the center strictly inside and never grow the slack") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const BigReal eps = pow2(-32, P128);
  for (int trial = 0; trial < 25; ++trial) {
    LinearProgram lp = unit_box(3);
    ChebyshevCenterSolver warm(lp.lower, lp.upper, P128);
    BigReal previous_slack = R(1);
    for (int k = 0; k < 12; ++k) {
      LinearInequality row{{R(dist(rng)), R(dist(rng)), R(dist(rng))}, R(0.3 * dist(rng) + 0.5)};
      lp.inequalities.push_back(row);
      warm.add(row);
      const auto cold = lp_chebyshev_center(lp, eps);
      const ChebyshevCenter hot = warm.solve();
      if (!cold) {
        CHECK(hot.slack < eps);
        break;
      }
      // Warm and cold starts agree on the optimum value.
      CHECK(abs(hot.slack - cold->slack) < pow2(-100, P128));
      CHECK(cold->slack <= previous_slack);
      previous_slack = cold->slack;
      for (const auto& ineq : lp.inequalities) {
        BigReal lhs(P128);
        for (std::size_t i = 0; i < 3; ++i) lhs.add_product(ineq.coeffs[i], cold->point[i]);
        CHECK(lhs < ineq.bound);
      }
      for (const auto& v : cold->point) {
        CHECK(v > 0L);
        CHECK(v < 1L);
      }
    }
  }
}
