#pragma once

#include "emm/big_real.hpp"
#include "emm/linear_program.hpp"
#include "emm/moment_engine.hpp"
#include "emm/sym_matrix.hpp"

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace emm {

/// Missing-moment coordinates (u_1, u_2, u_3); u_0 = 1 - u_1 - u_2 - u_3.
using MissingMoments = std::array<BigReal, kMissingOrder>;

/// Shifted Hankel forms for one (sigma, J): a[l](j1, j2) = normalized[sigma + j1 + j2][l], so the
/// moment matrix at a candidate is a[0] + sum_{l >= 1} u_l a[l].
struct HankelFormSet {
  int sigma = 0;
  int order_j = 0;
  std::array<SymMatrix, kMissingCount> a;

  SymMatrix at(const MissingMoments& u) const;
};

/// Largest J with sigma + 2J <= p_max (-1 when none).
int max_hankel_order(int p_max, int sigma);

/// Throws std::invalid_argument when sigma is not 0/1 or sigma + 2J exceeds the table.
HankelFormSet assemble_hankel(const MomentCoefficientTable& table, int sigma, int order_j);

/// Every set for sigma in {0, 1} and J = 0..max_hankel_order, sigma-major.
std::vector<HankelFormSet> assemble_all(const MomentCoefficientTable& table);

enum class Scaling {
  none,      ///< eigenpair of H(u) itself
  diagonal,  ///< eigenpair of D H D with D = diag(H)^{-1/2} (unit diagonal when PD)
};

struct CandidateEvaluation {
  BigReal min_eigenvalue;
  /// Coefficient vector C with C^T H C = min_eigenvalue (the scaled eigenvector mapped back).
  std::vector<BigReal> coefficients;
};

/// Minimum eigenpair of H(u) for each set.
std::vector<CandidateEvaluation> evaluate_candidate(std::span<const HankelFormSet> sets, const MissingMoments& u,
                                                    Scaling scaling = Scaling::none);

enum class CutPolicy {
  all_violated,    ///< one cut from every violated (sigma, J) set per round
  first_violated,  ///< one cut per sigma, from the smallest violated J
};

struct FeasibilityConfig {
  PrecisionBits precision{256};
  /// Generated cuts allowed before giving up with IndeterminateError (seeded cuts not counted).
  int max_cuts = 500;
  CutPolicy cut_policy = CutPolicy::first_violated;
  /// Record the scaled minimum eigenvalue of every (sigma, J) set at the final candidate.
  bool collect_spectra = true;

  /// Eigenvalue floor for the diagonally scaled Hankel matrices, 2^(-bits/4).
  BigReal psd_tolerance() const;
  /// Minimum LP slack for a nonempty open polytope, 2^(-bits/4).
  BigReal eps_strict() const;
};

struct HankelCut {
  int sigma = 0;
  int order_j = 0;
  std::vector<BigReal> coefficients;  // C
  LinearInequality row;               // -sum_l (C^T A_l C) u_l < C^T A_0 C - psd_tolerance
  std::optional<MissingMoments> origin;  // candidate the cut was generated at; empty for seeds
};

/// Coefficient vector C for a (sigma, J) form. Positivity of C^T H C holds for every C, so a
/// vector harvested at one energy is a valid cut at any other.
struct CutSeed {
  int sigma = 0;
  int order_j = 0;
  std::vector<BigReal> coefficients;
};

struct SetSpectrum {
  int sigma = 0;
  int order_j = 0;
  BigReal min_eigenvalue;  // diagonally scaled
};

struct FeasibilityResult {
  bool feasible = false;
  std::optional<MissingMoments> witness_point;
  std::vector<SetSpectrum> min_eigenvalues;
  /// Seeded cuts first, then generated ones in the order they were added.
  std::vector<HankelCut> cuts_used;
  std::size_t seeded_cuts = 0;
  int iterations = 0;
  BigReal final_slack;
};

/// The cutting loop ran out of cuts before reaching a verdict.
class IndeterminateError : public std::runtime_error {
 public:
  IndeterminateError(const std::string& what, int iterations, std::size_t cuts, double last_slack)
      : std::runtime_error(what), iterations_(iterations), cuts_(cuts), last_slack_(last_slack) {}
  int iterations() const { return iterations_; }
  std::size_t cuts() const { return cuts_; }
  double last_slack() const { return last_slack_; }

 private:
  int iterations_;
  std::size_t cuts_;
  double last_slack_;
};

/// Box 0 < u_l < 1 and simplex u_1 + u_2 + u_3 < 1 (u_0 > 0).
LinearProgram initial_program(PrecisionBits prec);

/// initial_program plus every cut row of the result.
LinearProgram program_from_cuts(const FeasibilityResult& result, PrecisionBits prec);

/// Decides whether some missing-moment vector makes every Stieltjes Hankel matrix up to
/// order p_max positive definite at the given energy. Seeds whose (sigma, J) does not fit
/// p_max are skipped. Throws IndeterminateError when the cut budget runs out,
/// std::invalid_argument when p_max < 3.
FeasibilityResult feasibility_test(const BigReal& energy, int p_max, const FeasibilityConfig& cfg,
                                   std::span<const CutSeed> seeds = {});

/// The generated (non-seeded) cuts of a result as seeds for a neighbouring test.
std::vector<CutSeed> harvest_seeds(const FeasibilityResult& result);

}  // namespace emm
