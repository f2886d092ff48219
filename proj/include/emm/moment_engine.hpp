#pragma once

#include "emm/big_real.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace emm {

/// Number of missing moments minus one for the -ix^3 Stieltjes problem (u_0..u_3).
inline constexpr int kMissingOrder = 3;
inline constexpr int kMissingCount = kMissingOrder + 1;
/// Hamburger problem: missing moments mu_0..mu_6.
inline constexpr int kHamburgerMissingCount = 7;

using MomentRow = std::array<BigReal, kMissingCount>;
using HamburgerRow = std::array<BigReal, kHamburgerMissingCount>;

/// Coefficients of one step of a linear moment recursion:
///   4 m_next = lag * m_lag + 4 E * local * m_local
/// where a zero coefficient marks an absent term.
struct RecursionStep {
  std::int64_t lag;
  std::int64_t local;
};

/// Stieltjes step producing u_{rho+4} from u_{rho-1} (lag) and u_rho (local).
RecursionStep stieltjes_step(int rho);
/// Hamburger step producing mu_{p+7} from mu_{p-3} (lag) and mu_{p-1} (local).
RecursionStep hamburger_step(int p);

/// Coefficients expressing each Stieltjes moment u_rho through the missing moments u_0..u_3,
/// at a fixed real energy.
struct MomentCoefficientTable {
  int p_max = 0;
  BigReal energy;
  /// raw[rho][l] = M_{rho,l}(E)
  std::vector<MomentRow> raw;
  /// normalized[rho][0] = M_{rho,0}; normalized[rho][l] = M_{rho,l} - M_{rho,0}, l >= 1.
  std::vector<MomentRow> normalized;

  PrecisionBits precision() const { return energy.precision(); }

  /// u_rho given all four missing moments.
  BigReal evaluate_raw(int rho, const std::array<BigReal, kMissingCount>& u) const;
  /// u_rho given u_1..u_3, with u_0 = 1 - u_1 - u_2 - u_3.
  BigReal evaluate_normalized(int rho, const std::array<BigReal, kMissingOrder>& u) const;
};

/// Builds raw and normalized rows 0..p_max. Throws std::invalid_argument when p_max < 3.
MomentCoefficientTable build_stieltjes_table(const BigReal& energy, int p_max);

/// Recomputes the normalized rows from the raw rows.
MomentCoefficientTable normalize_table(MomentCoefficientTable table);

struct HamburgerTable {
  int p_max_h = 0;
  BigReal energy;
  std::vector<HamburgerRow> raw;

  BigReal evaluate(int p, const std::array<BigReal, kHamburgerMissingCount>& mu) const;
};

/// Rows 0..p_max_h of the Hamburger recursion. Throws std::invalid_argument when p_max_h < 7.
HamburgerTable build_hamburger_table(const BigReal& energy, int p_max_h);

/// Seed u_0..u_3 drawn uniformly from the open simplex sum = 1, reproducible from `seed`.
std::array<BigReal, kMissingCount> random_interior_seed(std::uint64_t seed, PrecisionBits prec);

/// max over rho <= p_max of |mu_{2 rho} - u_rho| when both recursions start from the same
/// missing moments (mu_{2l} = u_l, odd mu zero).
BigReal stieltjes_hamburger_consistency(const BigReal& energy, int p_max,
                                        const std::array<BigReal, kMissingCount>& seed);
BigReal stieltjes_hamburger_consistency(const BigReal& energy, int p_max, std::uint64_t seed = 0x5eed);

}  // namespace emm
