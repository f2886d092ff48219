#include "emm/moment_engine.hpp"

#include <random>
#include <stdexcept>

namespace emm {

RecursionStep stieltjes_step(int rho) {
  const std::int64_t r = rho;
  return {(2 * r + 5) * (2 * r + 1) * (2 * r) * (2 * r - 1), (2 * r + 1) * (2 * r + 5)};
}

RecursionStep hamburger_step(int p) {
  const std::int64_t q = p;
  return {(q + 4) * q * (q - 1) * (q - 2), q * (q + 4)};
}

namespace {

// out = (lag * lag_row + 4 E local * local_row) / 4, columnwise; lag_row may be absent.
template <std::size_t N>
std::array<BigReal, N> recurse(const RecursionStep& step, const std::array<BigReal, N>* lag_row,
                               const std::array<BigReal, N>& local_row, const BigReal& energy) {
  const PrecisionBits prec = energy.precision();
  const BigReal local_factor = energy * static_cast<long>(step.local);
  std::array<BigReal, N> out;
  for (std::size_t l = 0; l < N; ++l) {
    BigReal v(prec);
    if (lag_row != nullptr && step.lag != 0) {
      v = (*lag_row)[l] * static_cast<long>(step.lag);
      v /= 4L;
    }
    v.add_product(local_factor, local_row[l]);
    out[l] = std::move(v);
  }
  return out;
}

}  // namespace

BigReal MomentCoefficientTable::evaluate_raw(int rho, const std::array<BigReal, kMissingCount>& u) const {
  const auto& row = raw.at(static_cast<std::size_t>(rho));
  BigReal sum(precision());
  for (int l = 0; l < kMissingCount; ++l) sum.add_product(row[l], u[l]);
  return sum;
}

BigReal MomentCoefficientTable::evaluate_normalized(int rho, const std::array<BigReal, kMissingOrder>& u) const {
  const auto& row = normalized.at(static_cast<std::size_t>(rho));
  BigReal sum = row[0];
  for (int l = 1; l < kMissingCount; ++l) sum.add_product(row[l], u[l - 1]);
  return sum;
}

MomentCoefficientTable build_stieltjes_table(const BigReal& energy, int p_max) {
  if (p_max < kMissingOrder) {
    throw std::invalid_argument("build_stieltjes_table: p_max must be at least 3");
  }
  const PrecisionBits prec = energy.precision();
  MomentCoefficientTable t;
  t.p_max = p_max;
  t.energy = energy;
  t.raw.reserve(static_cast<std::size_t>(p_max) + 1);
  for (int rho = 0; rho <= kMissingOrder; ++rho) {
    MomentRow row;
    for (int l = 0; l < kMissingCount; ++l) row[l] = BigReal(rho == l ? 1L : 0L, prec);
    t.raw.push_back(std::move(row));
  }
  for (int next = kMissingCount; next <= p_max; ++next) {
    const int rho = next - kMissingCount;
    const MomentRow* lag = rho >= 1 ? &t.raw[static_cast<std::size_t>(rho - 1)] : nullptr;
    t.raw.push_back(recurse(stieltjes_step(rho), lag, t.raw[static_cast<std::size_t>(rho)], energy));
  }
  return normalize_table(std::move(t));
}

MomentCoefficientTable normalize_table(MomentCoefficientTable table) {
  table.normalized.clear();
  table.normalized.reserve(table.raw.size());
  for (const auto& row : table.raw) {
    MomentRow n;
    n[0] = row[0];
    for (int l = 1; l < kMissingCount; ++l) n[l] = row[l] - row[0];
    table.normalized.push_back(std::move(n));
  }
  return table;
}

BigReal HamburgerTable::evaluate(int p, const std::array<BigReal, kHamburgerMissingCount>& mu) const {
  const auto& row = raw.at(static_cast<std::size_t>(p));
  BigReal sum(energy.precision());
  for (int l = 0; l < kHamburgerMissingCount; ++l) sum.add_product(row[l], mu[l]);
  return sum;
}

HamburgerTable build_hamburger_table(const BigReal& energy, int p_max_h) {
  if (p_max_h < kHamburgerMissingCount) {
    throw std::invalid_argument("build_hamburger_table: p_max_h must be at least 7");
  }
  const PrecisionBits prec = energy.precision();
  HamburgerTable t;
  t.p_max_h = p_max_h;
  t.energy = energy;
  t.raw.reserve(static_cast<std::size_t>(p_max_h) + 1);
  for (int p = 0; p < kHamburgerMissingCount; ++p) {
    HamburgerRow row;
    for (int l = 0; l < kHamburgerMissingCount; ++l) row[l] = BigReal(p == l ? 1L : 0L, prec);
    t.raw.push_back(std::move(row));
  }
  for (int next = kHamburgerMissingCount; next <= p_max_h; ++next) {
    const int p = next - kHamburgerMissingCount;
    const HamburgerRow* lag = p >= 3 ? &t.raw[static_cast<std::size_t>(p - 3)] : nullptr;
    if (p == 0) {
      // mu_7: both terms carry the factor p.
      HamburgerRow zero;
      for (auto& z : zero) z = BigReal(prec);
      t.raw.push_back(std::move(zero));
      continue;
    }
    t.raw.push_back(recurse(hamburger_step(p), lag, t.raw[static_cast<std::size_t>(p - 1)], energy));
  }
  return t;
}

std::array<BigReal, kMissingCount> random_interior_seed(std::uint64_t seed, PrecisionBits prec) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> dist(1.0);
  std::array<double, kMissingCount> w{};
  double total = 0.0;
  for (auto& x : w) {
    x = dist(rng) + 1e-3;
    total += x;
  }
  std::array<BigReal, kMissingCount> u;
  BigReal sum(prec);
  for (int l = 1; l < kMissingCount; ++l) {
    u[l] = BigReal(w[l] / total, prec);
    sum += u[l];
  }
  u[0] = BigReal(1L, prec) - sum;
  return u;
}

BigReal stieltjes_hamburger_consistency(const BigReal& energy, int p_max,
                                        const std::array<BigReal, kMissingCount>& seed) {
  if (p_max < kMissingCount) throw std::invalid_argument("stieltjes_hamburger_consistency: p_max must be at least 4");
  const PrecisionBits prec = energy.precision();
  const auto st = build_stieltjes_table(energy, p_max);
  const auto hb = build_hamburger_table(energy, std::max(2 * p_max, kHamburgerMissingCount));
  std::array<BigReal, kHamburgerMissingCount> mu;
  for (int l = 0; l < kHamburgerMissingCount; ++l) {
    mu[l] = (l % 2 == 0) ? seed[static_cast<std::size_t>(l / 2)] : BigReal(prec);
  }
  BigReal worst(prec);
  for (int rho = 0; rho <= p_max; ++rho) {
    const BigReal diff = abs(hb.evaluate(2 * rho, mu) - st.evaluate_raw(rho, seed));
    if (diff > worst) worst = diff;
  }
  return worst;
}

BigReal stieltjes_hamburger_consistency(const BigReal& energy, int p_max, std::uint64_t seed) {
  return stieltjes_hamburger_consistency(energy, p_max, random_interior_seed(seed, energy.precision()));
}

}  // namespace emm
