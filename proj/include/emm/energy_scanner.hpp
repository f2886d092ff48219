#pragma once

#include "emm/big_real.hpp"
#include "emm/hankel_feasibility.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace emm {

/// How a reported moment order maps onto the highest Stieltjes index generated.
enum class OrderConvention {
  stieltjes_index,  ///< order == Stieltjes p_max
  hamburger_index,  ///< order counts Hamburger moments; Stieltjes p_max = order / 2
};

std::string to_string(OrderConvention c);
/// Throws std::invalid_argument on an unknown name.
OrderConvention parse_order_convention(const std::string& name);

int stieltjes_p_max(int order, OrderConvention convention);

/// 128 + 64 * ceil(p_max / 10) bits.
PrecisionBits default_precision(int p_max);

struct ScanSettings {
  OrderConvention order_convention = OrderConvention::stieltjes_index;
  /// Fixed working precision; when unset, default_precision(p_max) per order.
  std::optional<PrecisionBits> precision;
  int max_cuts = 500;
  CutPolicy cut_policy = CutPolicy::first_violated;
  /// Interior grid points tried inside an interval when stepping to the next order.
  int nested_grid_points = 8;
  /// Upper limit for the nested grid after repeated doubling.
  int nested_grid_limit = 512;

  FeasibilityConfig feasibility_for(int p_max) const;
};

/// Feasibility tests at one order, sharing a pool of recent cut vectors between calls.
class FeasibilityProbe {
 public:
  FeasibilityProbe(int p_max, const ScanSettings& settings, std::vector<CutSeed> pool = {});

  bool feasible(const BigReal& energy);
  int p_max() const { return p_max_; }
  PrecisionBits precision() const { return cfg_.precision; }
  std::size_t tests() const { return tests_; }
  const std::vector<CutSeed>& pool() const { return pool_; }

 private:
  int p_max_;
  FeasibilityConfig cfg_;
  std::vector<CutSeed> pool_;
  std::size_t tests_ = 0;
};

/// Maximal run of feasible grid points.
struct CoarseInterval {
  BigReal first_feasible;
  BigReal last_feasible;
  std::optional<BigReal> infeasible_below;  // absent when the run touches e_min
  std::optional<BigReal> infeasible_above;  // absent when the run touches e_max
  bool truncated_low() const { return !infeasible_below.has_value(); }
  bool truncated_high() const { return !infeasible_above.has_value(); }
};

/// Grid scan of [e_min, e_max] at Stieltjes order p_max. IndeterminateError propagates.
std::vector<CoarseInterval> scan_feasible_set(const BigReal& e_min, const BigReal& e_max, const BigReal& grid_step,
                                              int p_max, const ScanSettings& settings);
std::vector<CoarseInterval> scan_feasible_set(const BigReal& e_min, const BigReal& e_max, const BigReal& grid_step,
                                              FeasibilityProbe& probe);

struct EndpointBracket {
  BigReal feasible;
  BigReal infeasible;
  BigReal midpoint() const { return (feasible + infeasible) / 2L; }
  BigReal width() const { return abs(feasible - infeasible); }
};

/// Re-tests both ends (std::runtime_error unless feasible/infeasible as labelled), then
/// bisects until |bracket| <= tol.
EndpointBracket refine_endpoint(const BigReal& feasible_e, const BigReal& infeasible_e, int p_max, const BigReal& tol,
                                const ScanSettings& settings);
/// Bisection on a bracket whose verdicts are already known.
EndpointBracket bisect_endpoint(EndpointBracket bracket, const BigReal& tol, FeasibilityProbe& probe);

struct EnergyInterval {
  /// Index of the discrete level, or the lowest candidate for a merged interval.
  int level_index = 0;
  /// Every level whose high-order interval descends from this one (size > 1: merged).
  std::vector<int> candidate_levels;
  int order = 0;  ///< as requested, in the configured convention
  int p_max = 0;  ///< Stieltjes index actually used
  /// Outward bounds: infeasible energies within endpoint_tolerance of the boundary.
  BigReal lower;
  BigReal upper;
  /// Feasible energies on the inside of each bracket.
  BigReal lower_inner;
  BigReal upper_inner;
  BigReal endpoint_tolerance;
  bool truncated_low = false;
  bool truncated_high = false;
  PrecisionBits precision{};

  bool merged() const { return candidate_levels.size() > 1; }
  BigReal width() const { return upper - lower; }
};

struct LevelBounds {
  int level = 0;
  std::vector<EnergyInterval> intervals;  // increasing order
};

struct BoundsRequest {
  int levels = 1;
  std::vector<int> orders;
  BigReal e_min;
  BigReal e_max;
  BigReal grid_step;
  /// Endpoint tolerance per order; empty means width * relative_tolerance.
  std::vector<BigReal> endpoint_tolerances;
  double relative_tolerance = 1e-4;
  ScanSettings settings;
};

struct BoundsReport {
  std::vector<LevelBounds> levels;
  BoundsRequest request;
  std::size_t feasibility_tests = 0;
};

/// Thrown when consecutive orders break the nesting property beyond tolerance.
class NestingViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full-domain scan at the first order, then each interval is followed through every
/// intermediate Stieltjes order up to the last requested one.
BoundsReport bounds_table(const BoundsRequest& request);

/// Throws NestingViolation if some level's bounds fail to nest across consecutive orders.
void check_nesting(const BoundsReport& report);

}  // namespace emm
