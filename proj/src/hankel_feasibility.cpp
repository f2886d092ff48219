#include "emm/hankel_feasibility.hpp"

#include "emm/sym_eigen.hpp"

#include <sstream>

namespace emm {

SymMatrix HankelFormSet::at(const MissingMoments& u) const {
  SymMatrix h = a[0];
  for (int l = 1; l < kMissingCount; ++l) h.add_scaled(a[l], u[l - 1]);
  return h;
}

int max_hankel_order(int p_max, int sigma) {
  if (p_max < sigma) return -1;
  return (p_max - sigma) / 2;
}

HankelFormSet assemble_hankel(const MomentCoefficientTable& table, int sigma, int order_j) {
  if (sigma != 0 && sigma != 1) throw std::invalid_argument("assemble_hankel: sigma must be 0 or 1");
  if (order_j < 0 || sigma + 2 * order_j > table.p_max) {
    throw std::invalid_argument("assemble_hankel: sigma + 2J exceeds the moment table");
  }
  const auto n = static_cast<std::size_t>(order_j) + 1;
  HankelFormSet set;
  set.sigma = sigma;
  set.order_j = order_j;
  for (int l = 0; l < kMissingCount; ++l) {
    SymMatrix m(n, table.precision());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        m.set(i, j, table.normalized[static_cast<std::size_t>(sigma) + i + j][static_cast<std::size_t>(l)]);
      }
    }
    set.a[l] = std::move(m);
  }
  return set;
}

std::vector<HankelFormSet> assemble_all(const MomentCoefficientTable& table) {
  std::vector<HankelFormSet> sets;
  for (int sigma = 0; sigma <= 1; ++sigma) {
    for (int j = 0; j <= max_hankel_order(table.p_max, sigma); ++j) sets.push_back(assemble_hankel(table, sigma, j));
  }
  return sets;
}

namespace {

struct ScaledMatrix {
  SymMatrix scaled;
  std::vector<BigReal> d;  // scaled = D H D
};

// Diagonal equilibration; a non-positive diagonal entry falls back to the coefficient scale
// of that entry, which leaves its sign (and hence the indefiniteness) visible.
ScaledMatrix equilibrate(const SymMatrix& h, const HankelFormSet& set) {
  const std::size_t n = h.dim();
  const PrecisionBits prec = h.precision();
  std::vector<BigReal> d(n, BigReal(prec));
  for (std::size_t j = 0; j < n; ++j) {
    BigReal s = h(j, j);
    if (s.sign() <= 0) {
      s = BigReal(prec);
      for (const auto& a : set.a) s += abs(a(j, j));
      if (s.is_zero()) s = BigReal(1L, prec);
    }
    d[j] = BigReal(1L, prec) / sqrt(s);
  }
  SymMatrix out(n, prec);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) out.set(i, j, h(i, j) * d[i] * d[j]);
  }
  return {std::move(out), std::move(d)};
}

CandidateEvaluation min_pair(const SymMatrix& m, const std::vector<BigReal>* d) {
  EigenPair p = min_eigenpair(m);
  if (d != nullptr) {
    for (std::size_t i = 0; i < p.vector.size(); ++i) p.vector[i] *= (*d)[i];
  }
  return {std::move(p.value), std::move(p.vector)};
}

HankelCut make_cut(const HankelFormSet& set, std::vector<BigReal> c, const BigReal& tau) {
  HankelCut cut;
  cut.sigma = set.sigma;
  cut.order_j = set.order_j;
  cut.row.coeffs.reserve(kMissingOrder);
  for (int l = 1; l < kMissingCount; ++l) cut.row.coeffs.push_back(-set.a[l].quadratic_form(c));
  cut.row.bound = set.a[0].quadratic_form(c) - tau;
  cut.coefficients = std::move(c);
  return cut;
}

BigReal energy_at(const BigReal& e, PrecisionBits prec) {
  BigReal out = e;
  out.set_precision(prec);
  return out;
}

}  // namespace

std::vector<CandidateEvaluation> evaluate_candidate(std::span<const HankelFormSet> sets, const MissingMoments& u,
                                                    Scaling scaling) {
  std::vector<CandidateEvaluation> out;
  out.reserve(sets.size());
  for (const auto& set : sets) {
    const SymMatrix h = set.at(u);
    if (scaling == Scaling::none) {
      out.push_back(min_pair(h, nullptr));
    } else {
      const auto eq = equilibrate(h, set);
      out.push_back(min_pair(eq.scaled, &eq.d));
    }
  }
  return out;
}

BigReal FeasibilityConfig::psd_tolerance() const { return pow2(-precision.bits / 4, precision); }

BigReal FeasibilityConfig::eps_strict() const { return pow2(-precision.bits / 4, precision); }

LinearProgram initial_program(PrecisionBits prec) {
  LinearProgram lp;
  lp.num_vars = kMissingOrder;
  lp.lower.assign(kMissingOrder, BigReal(prec));
  lp.upper.assign(kMissingOrder, BigReal(1L, prec));
  lp.inequalities.push_back({std::vector<BigReal>(kMissingOrder, BigReal(1L, prec)), BigReal(1L, prec)});
  return lp;
}

LinearProgram program_from_cuts(const FeasibilityResult& result, PrecisionBits prec) {
  LinearProgram lp = initial_program(prec);
  for (const auto& cut : result.cuts_used) lp.inequalities.push_back(cut.row);
  return lp;
}

FeasibilityResult feasibility_test(const BigReal& energy, int p_max, const FeasibilityConfig& cfg,
                                   std::span<const CutSeed> seeds) {
  const PrecisionBits prec = cfg.precision;
  const MomentCoefficientTable table = build_stieltjes_table(energy_at(energy, prec), p_max);
  const BigReal tau = cfg.psd_tolerance();
  const BigReal eps = cfg.eps_strict();

  // Only the largest set per sigma is factored each round: the smaller ones are its leading
  // blocks under the same scaling, so they pass whenever it does.
  std::array<std::vector<HankelFormSet>, 2> sets;
  for (int sigma = 0; sigma <= 1; ++sigma) {
    for (int j = 0; j <= max_hankel_order(p_max, sigma); ++j) sets[sigma].push_back(assemble_hankel(table, sigma, j));
  }

  const LinearProgram start = initial_program(prec);
  ChebyshevCenterSolver solver(start.lower, start.upper, prec);
  for (const auto& row : start.inequalities) solver.add(row);

  FeasibilityResult result;
  for (const auto& seed : seeds) {
    if (seed.sigma < 0 || seed.sigma > 1 || seed.order_j > max_hankel_order(p_max, seed.sigma)) continue;
    const HankelFormSet& set = sets[seed.sigma][static_cast<std::size_t>(seed.order_j)];
    if (seed.coefficients.size() != set.a[0].dim()) continue;
    std::vector<BigReal> c = seed.coefficients;
    for (auto& x : c) x.set_precision(prec);
    HankelCut cut = make_cut(set, std::move(c), tau);
    solver.add(cut.row);
    result.cuts_used.push_back(std::move(cut));
    ++result.seeded_cuts;
  }
  auto record_spectra = [&](const MissingMoments& u) {
    if (!cfg.collect_spectra) return;
    result.min_eigenvalues.clear();
    for (int sigma = 0; sigma <= 1; ++sigma) {
      const auto evals = evaluate_candidate(sets[sigma], u, Scaling::diagonal);
      for (std::size_t j = 0; j < evals.size(); ++j) {
        result.min_eigenvalues.push_back({sigma, static_cast<int>(j), evals[j].min_eigenvalue});
      }
    }
  };

  std::optional<MissingMoments> last_candidate;
  for (;;) {
    const ChebyshevCenter center = solver.solve();
    result.final_slack = center.slack;
    if (!(center.slack >= eps)) {
      if (last_candidate) record_spectra(*last_candidate);
      return result;
    }
    ++result.iterations;
    const MissingMoments u{center.point[0], center.point[1], center.point[2]};
    last_candidate = u;

    std::size_t new_cuts = 0;
    for (int sigma = 0; sigma <= 1; ++sigma) {
      if (sets[sigma].empty()) continue;
      const HankelFormSet& full = sets[sigma].back();
      const SymMatrix h = full.at(u);
      const ScaledMatrix eq = equilibrate(h, full);
      const std::size_t passing = positive_definite_prefix(eq.scaled, tau);
      if (passing == eq.scaled.dim()) continue;
      // Blocks of size > passing all fail (eigenvalue interlacing); cut each one.
      const std::size_t last = cfg.cut_policy == CutPolicy::all_violated ? sets[sigma].size() : passing + 1;
      for (std::size_t j = passing; j < last; ++j) {
        const SymMatrix block = eq.scaled.leading_block(j + 1);
        const std::vector<BigReal> dj(eq.d.begin(), eq.d.begin() + static_cast<long>(j + 1));
        CandidateEvaluation ev = min_pair(block, &dj);
        if (ev.min_eigenvalue > tau) continue;
        HankelCut cut = make_cut(sets[sigma][j], std::move(ev.coefficients), tau);
        cut.origin = u;
        solver.add(cut.row);
        result.cuts_used.push_back(std::move(cut));
        ++new_cuts;
      }
    }
    if (new_cuts == 0) {
      result.feasible = true;
      result.witness_point = u;
      record_spectra(u);
      return result;
    }
    if (static_cast<int>(result.cuts_used.size() - result.seeded_cuts) > cfg.max_cuts) {
      std::ostringstream msg;
      msg << "feasibility_test: no verdict at E = " << energy.to_string(20) << ", p_max = " << p_max << " after "
          << result.cuts_used.size() << " cuts (" << prec.bits << "-bit precision, slack "
          << center.slack.to_string(6) << "); raise the precision";
      throw IndeterminateError(msg.str(), result.iterations, result.cuts_used.size(), center.slack.to_double());
    }
  }
}

std::vector<CutSeed> harvest_seeds(const FeasibilityResult& result) {
  std::vector<CutSeed> seeds;
  for (std::size_t k = result.seeded_cuts; k < result.cuts_used.size(); ++k) {
    const auto& cut = result.cuts_used[k];
    seeds.push_back({cut.sigma, cut.order_j, cut.coefficients});
  }
  return seeds;
}

}  // namespace emm
