#pragma once

#include "emm/energy_scanner.hpp"
#include "emm/hankel_feasibility.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace emm::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_usage = 2,
  exit_indeterminate = 3,
  exit_validation = 4,
};

struct RunConfig {
  std::string subcommand;
  std::vector<int> orders;
  int levels = 1;
  std::string e_min = "0";
  std::string e_max = "5";
  std::string grid_step = "0.05";
  std::optional<long> precision_bits;
  std::string convention = "stieltjes-index";
  std::vector<std::string> endpoint_tolerances;
  double relative_tolerance = 1e-4;
  int max_cuts = 500;
  std::string cut_policy = "first-violated";
  std::string format = "text";  // text | csv | json
  std::string output;           // empty: stdout
  bool certificates = true;

  // feasible
  std::string energy;

  // validate
  long oracle_bits = 128;
  double step = 1e-3;
  double half_length = 8.0;
  double match_tolerance = 1e-10;
  double residual_tolerance = 1e-4;
  double closure_tolerance = 1e-4;
  int closure_rho = 10;
  int witness_order = 20;
  double perturb_energy = 0.0;
  bool richardson = true;

  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
  ScanSettings scan_settings() const;
  BoundsRequest bounds_request() const;
};

nlohmann::json config_to_json(const RunConfig& cfg);

/// Decimal string that parses back to the identical value at the same precision.
std::string decimal(const BigReal& x);

/// With certificates, every reported endpoint is re-tested from scratch and the verdict is
/// attached: the witness for inner (feasible) points, the full cut list for outer ones.
nlohmann::json bounds_to_json(const BoundsReport& report, const RunConfig& cfg, bool with_certificates);
std::string bounds_to_csv(const BoundsReport& report);
std::string bounds_to_text(const BoundsReport& report);

nlohmann::json feasibility_to_json(const FeasibilityResult& r, const BigReal& energy, int order, int p_max,
                                   PrecisionBits prec);

/// Parses argv, runs the subcommand and writes to out / err. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace emm::cli
