#include "doctest.h"

#include "emm/moment_engine.hpp"
#include "rational_oracle.hpp"

#include <random>

using namespace emm;

namespace {

const PrecisionBits P{192};

BigReal R(double x) { return BigReal(x, P); }

BigReal from_rational(const mpq_class& q) {
  return BigReal(q.get_num().get_str(), P) / BigReal(q.get_den().get_str(), P);
}

}  // namespace

TEST_CASE("Stieltjes table: identity block in rows 0..3 at any energy") {
  for (double e : {0.0, 1.0, -3.5, 17.25}) {
    const auto t = build_stieltjes_table(R(e), 6);
    for (int rho = 0; rho <= 3; ++rho) {
      for (int l = 0; l <= 3; ++l) CHECK(t.raw[rho][l] == (rho == l ? 1L : 0L));
    }
  }
}

TEST_CASE("Stieltjes table: rows 4 and 5 by direct substitution") {
  const BigReal e = R(1.75);
  const auto t = build_stieltjes_table(e, 5);
  CHECK(t.raw[4][0] == e * 5L);
  CHECK(t.raw[4][1].is_zero());
  CHECK(t.raw[4][2].is_zero());
  CHECK(t.raw[4][3].is_zero());
  CHECK(t.raw[5][0] == R(10.5));
  CHECK(t.raw[5][1] == e * 21L);
  CHECK(t.raw[5][2].is_zero());
  CHECK(t.raw[5][3].is_zero());
}

TEST_CASE("Stieltjes table rejects p_max < 3") {
  CHECK_THROWS_AS(build_stieltjes_table(R(1), 2), std::invalid_argument);
  CHECK_NOTHROW(build_stieltjes_table(R(1), 3));
}

TEST_CASE("normalize_table: row 4 at E = 1 and the identity block") {
  const auto t = build_stieltjes_table(R(1), 4);
  CHECK(t.normalized[4][0] == 5L);
  for (int l = 1; l <= 3; ++l) CHECK(t.normalized[4][l] == -5L);
  CHECK(t.normalized[0][0] == 1L);
  for (int l = 1; l <= 3; ++l) CHECK(t.normalized[0][l] == -1L);
  for (int rho = 1; rho <= 3; ++rho) {
    for (int l = 0; l <= 3; ++l) CHECK(t.normalized[rho][l] == t.raw[rho][l]);
  }
}

TEST_CASE("normalize_table: u = (1,0,0,0) gives identical raw and normalized evaluations") {
  const auto t = build_stieltjes_table(R(2.3), 20);
  const std::array<BigReal, 4> u{R(1), R(0), R(0), R(0)};
  const std::array<BigReal, 3> uhat{R(0), R(0), R(0)};
  for (int rho = 0; rho <= 20; ++rho) CHECK(t.evaluate_raw(rho, u) == t.evaluate_normalized(rho, uhat));
}

TEST_CASE("normalized and raw agree on the simplex sum u = 1") {
  std::mt19937_64 rng(5);
  const auto t = build_stieltjes_table(R(4.1), 30);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_interior_seed(rng(), P);
    const std::array<BigReal, 3> uhat{u[1], u[2], u[3]};
    for (int rho = 0; rho <= 30; ++rho) {
      const BigReal a = t.evaluate_raw(rho, u);
      const BigReal b = t.evaluate_normalized(rho, uhat);
      CHECK(abs(a - b) <= pow2(-P.bits / 2, P) * max(abs(a), R(1)));
    }
  }
}

TEST_CASE("each raw column satisfies the recursion independently") {
  const BigReal e = R(0.7);
  const auto t = build_stieltjes_table(e, 25);
  for (int rho = 0; rho + 4 <= 25; ++rho) {
    for (int l = 0; l < 4; ++l) {
      BigReal rhs = e * 4L * static_cast<long>((2 * rho + 1) * (2 * rho + 5)) * t.raw[rho][l];
      if (rho >= 1) rhs += t.raw[rho - 1][l] * static_cast<long>((2 * rho + 5) * (2 * rho + 1) * (2 * rho) * (2 * rho - 1));
      CHECK(abs(t.raw[rho + 4][l] * 4L - rhs) <= pow2(-P.bits + 8, P) * max(abs(rhs), R(1)));
    }
  }
}

TEST_CASE("raw entries are polynomials in E") {
  // Row rho has degree at most rho/4 in E; interpolating from deg+1 energies reproduces a fresh one.
  const int p_max = 16;
  const int deg = p_max / 4;
  std::vector<BigReal> nodes;
  std::vector<MomentCoefficientTable> tables;
  for (int k = 0; k <= deg; ++k) {
    nodes.push_back(R(0.5 + k));
    tables.push_back(build_stieltjes_table(nodes.back(), p_max));
  }
  const BigReal probe = R(2.71828);
  const auto direct = build_stieltjes_table(probe, p_max);
  for (int rho = 0; rho <= p_max; ++rho) {
    for (int l = 0; l < 4; ++l) {
      BigReal interp(P);
      for (int k = 0; k <= deg; ++k) {
        BigReal basis = R(1);
        for (int j = 0; j <= deg; ++j) {
          if (j != k) basis *= (probe - nodes[j]) / (nodes[k] - nodes[j]);
        }
        interp.add_product(basis, tables[k].raw[rho][l]);
      }
      CHECK(abs(interp - direct.raw[rho][l]) <= pow2(-P.bits / 2, P) * max(abs(direct.raw[rho][l]), R(1)));
    }
  }
}

TEST_CASE("Hamburger table: mu_7 = 0 and mu_8 = 5 E mu_0") {
  const BigReal e = R(1.3);
  const auto h = build_hamburger_table(e, 8);
  for (int l = 0; l < 7; ++l) CHECK(h.raw[7][l].is_zero());
  CHECK(h.raw[8][0] == e * 5L);
  for (int l = 1; l < 7; ++l) CHECK(h.raw[8][l].is_zero());
  CHECK_THROWS_AS(build_hamburger_table(e, 6), std::invalid_argument);
}

TEST_CASE("Hamburger table: odd rows vanish when odd missing moments are zero") {
  const auto h = build_hamburger_table(R(2.2), 40);
  std::array<BigReal, 7> mu{R(0.3), R(0), R(0.25), R(0), R(0.2), R(0), R(0.25)};
  for (int p = 1; p <= 40; p += 2) CHECK(h.evaluate(p, mu).is_zero());
  // Parity: odd rows have no weight on even missing moments and vice versa.
  for (int p = 0; p <= 40; ++p) {
    for (int l = 0; l < 7; ++l) {
      if ((p - l) % 2 != 0) CHECK(h.raw[p][l].is_zero());
    }
  }
}

TEST_CASE("step coefficients: Hamburger at p = 2 rho + 1 equals Stieltjes at rho") {
  for (int rho = 0; rho <= 3; ++rho) {
    const auto s = stieltjes_step(rho);
    const auto h = hamburger_step(2 * rho + 1);
    CHECK(s.lag == h.lag);
    CHECK(s.local == h.local);
  }
  CHECK(stieltjes_step(0).lag == 0);
  CHECK(stieltjes_step(0).local == 5);
  CHECK(stieltjes_step(1).lag == 42);
  CHECK(stieltjes_step(1).local == 21);
}

TEST_CASE("consistency: seed (1,0,0,0) at E = 0 is exact") {
  const std::array<BigReal, 4> seed{R(1), R(0), R(0), R(0)};
  CHECK(stieltjes_hamburger_consistency(R(0), 12, seed).is_zero());
}

TEST_CASE("consistency: seed (1/4,1/4,1/4,1/4) at E = 1 against exact rationals") {
  const std::array<mpq_class, 4> qseed{mpq_class(1, 4), mpq_class(1, 4), mpq_class(1, 4), mpq_class(1, 4)};
  const auto exact_u = testing::exact_stieltjes(mpq_class(1), qseed, 12);
  const auto exact_mu = testing::exact_hamburger(
      mpq_class(1), {qseed[0], 0, qseed[1], 0, qseed[2], 0, qseed[3]}, 24);
  BigReal largest = R(1);
  for (int rho = 0; rho <= 12; ++rho) {
    // The two exact recursions coincide on even indices.
    CHECK(exact_mu[2 * rho] == exact_u[rho]);
    largest = max(largest, abs(from_rational(exact_u[rho])));
  }
  const std::array<BigReal, 4> seed{R(0.25), R(0.25), R(0.25), R(0.25)};
  const BigReal disc = stieltjes_hamburger_consistency(R(1), 12, seed);
  CHECK(disc <= pow2(-P.bits / 2, P) * largest);

  const auto t = build_stieltjes_table(R(1), 12);
  for (int rho = 0; rho <= 12; ++rho) {
    const BigReal ref = from_rational(exact_u[rho]);
    CHECK(abs(t.evaluate_raw(rho, seed) - ref) <= pow2(-P.bits + 16, P) * max(abs(ref), R(1)));
  }
}

TEST_CASE("consistency holds on random seeds and energies") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> edist(-2.0, 20.0);
  for (int trial = 0; trial < 10; ++trial) {
    const BigReal e = R(edist(rng));
    const auto seed = random_interior_seed(rng(), P);
    const auto t = build_stieltjes_table(e, 12);
    BigReal largest = R(1);
    for (int rho = 0; rho <= 12; ++rho) largest = max(largest, abs(t.evaluate_raw(rho, seed)));
    CHECK(stieltjes_hamburger_consistency(e, 12, seed) <= pow2(-P.bits / 2, P) * largest);
  }
}
