#include "emm_cli.hpp"

#include "emm/schrodinger_oracle.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace emm::cli {

namespace {

// Input decimals are parsed well above any working precision, then rounded per order.
const PrecisionBits kParseBits{512};

// Accepted range for the residual ratio under step halving (second-order differences).
constexpr double kRichardsonLow = 3.3;
constexpr double kRichardsonHigh = 4.7;

BigReal parse(const std::string& text, const char* what) {
  try {
    return BigReal(text, kParseBits);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(std::string("invalid number for ") + what + ": '" + text + "'");
  }
}

CutPolicy parse_policy(const std::string& s) {
  if (s == "first-violated") return CutPolicy::first_violated;
  if (s == "all-violated") return CutPolicy::all_violated;
  throw std::invalid_argument("unknown cut policy '" + s + "'");
}

int decimals_for(const BigReal& tol) {
  const double t = tol.to_double();
  if (!(t > 0.0)) return 6;
  return std::clamp(static_cast<int>(std::ceil(-std::log10(t))), 1, 60);
}

}  // namespace

void RunConfig::validate() const {
  if (levels < 1) throw std::invalid_argument("--levels must be at least 1");
  if (format != "text" && format != "csv" && format != "json") {
    throw std::invalid_argument("unknown output format '" + format + "'");
  }
  parse_order_convention(convention);
  parse_policy(cut_policy);
  if (precision_bits && *precision_bits < 64) throw std::invalid_argument("--precision must be at least 64 bits");
  if (max_cuts < 1) throw std::invalid_argument("--max-cuts must be positive");
  if (subcommand == "bounds") {
    if (orders.empty()) throw std::invalid_argument("bounds: --pmax is required");
    for (std::size_t k = 1; k < orders.size(); ++k) {
      if (orders[k] <= orders[k - 1]) throw std::invalid_argument("--pmax list must be strictly increasing");
    }
    if (!(parse(e_min, "--emin") < parse(e_max, "--emax"))) throw std::invalid_argument("--emin must be below --emax");
    if (!(parse(grid_step, "--grid-step") > 0L)) throw std::invalid_argument("--grid-step must be positive");
    if (!endpoint_tolerances.empty() && endpoint_tolerances.size() != orders.size()) {
      throw std::invalid_argument("--tol needs one value per --pmax entry");
    }
    for (const auto& t : endpoint_tolerances) {
      if (!(parse(t, "--tol") > 0L)) throw std::invalid_argument("--tol values must be positive");
    }
    if (!(relative_tolerance > 0.0)) throw std::invalid_argument("--rel-tol must be positive");
  } else if (subcommand == "feasible") {
    if (orders.size() != 1) throw std::invalid_argument("feasible: give exactly one --pmax");
    if (energy.empty()) throw std::invalid_argument("feasible: --energy is required");
    parse(energy, "--energy");
  } else if (subcommand == "validate") {
    if (!(step > 0.0) || !(half_length > 0.0)) throw std::invalid_argument("--step and --length must be positive");
    if (!(residual_tolerance > 0.0) || !(closure_tolerance > 0.0) || !(match_tolerance > 0.0)) {
      throw std::invalid_argument("tolerances must be positive");
    }
    if (closure_rho < 4) throw std::invalid_argument("--closure-rho must be at least 4");
    if (oracle_bits < 64) throw std::invalid_argument("--oracle-precision must be at least 64 bits");
  }
}

ScanSettings RunConfig::scan_settings() const {
  ScanSettings s;
  s.order_convention = parse_order_convention(convention);
  if (precision_bits) s.precision = PrecisionBits{*precision_bits};
  s.max_cuts = max_cuts;
  s.cut_policy = parse_policy(cut_policy);
  return s;
}

BoundsRequest RunConfig::bounds_request() const {
  BoundsRequest req;
  req.levels = levels;
  req.orders = orders;
  req.e_min = parse(e_min, "--emin");
  req.e_max = parse(e_max, "--emax");
  req.grid_step = parse(grid_step, "--grid-step");
  for (const auto& t : endpoint_tolerances) req.endpoint_tolerances.push_back(parse(t, "--tol"));
  req.relative_tolerance = relative_tolerance;
  req.settings = scan_settings();
  return req;
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["subcommand"] = c.subcommand;
  j["pmax"] = c.orders;
  j["levels"] = c.levels;
  j["emin"] = c.e_min;
  j["emax"] = c.e_max;
  j["grid_step"] = c.grid_step;
  j["precision"] = c.precision_bits ? nlohmann::json(*c.precision_bits) : nlohmann::json("schedule");
  j["convention"] = c.convention;
  j["tol"] = c.endpoint_tolerances;
  j["rel_tol"] = c.relative_tolerance;
  j["max_cuts"] = c.max_cuts;
  j["cut_policy"] = c.cut_policy;
  if (!c.energy.empty()) j["energy"] = c.energy;
  if (c.subcommand == "validate") {
    j["oracle_precision"] = c.oracle_bits;
    j["step"] = c.step;
    j["length"] = c.half_length;
    j["match_tol"] = c.match_tolerance;
    j["residual_tol"] = c.residual_tolerance;
    j["closure_tol"] = c.closure_tolerance;
    j["closure_rho"] = c.closure_rho;
    j["witness_order"] = c.witness_order;
    j["perturb_energy"] = c.perturb_energy;
    j["richardson"] = c.richardson;
  }
  return j;
}

std::string decimal(const BigReal& x) { return x.to_string(0); }

nlohmann::json feasibility_to_json(const FeasibilityResult& r, const BigReal& energy, int order, int p_max,
                                   PrecisionBits prec) {
  nlohmann::json j;
  j["energy"] = decimal(energy);
  j["order"] = order;
  j["p_max"] = p_max;
  j["precision_bits"] = prec.bits;
  j["verdict"] = r.feasible ? "feasible" : "infeasible";
  j["iterations"] = r.iterations;
  j["seeded_cuts"] = r.seeded_cuts;
  j["final_slack"] = decimal(r.final_slack);
  if (r.witness_point) {
    auto& w = j["witness"] = nlohmann::json::array();
    for (const auto& u : *r.witness_point) w.push_back(decimal(u));
  } else {
    j["witness"] = nullptr;
  }
  auto& ev = j["min_eigenvalues"] = nlohmann::json::array();
  for (const auto& s : r.min_eigenvalues) ev.push_back({{"sigma", s.sigma}, {"J", s.order_j}, {"value", decimal(s.min_eigenvalue)}});
  auto& cuts = j["cuts"] = nlohmann::json::array();
  for (const auto& c : r.cuts_used) {
    nlohmann::json cj{{"sigma", c.sigma}, {"J", c.order_j}};
    auto& coeffs = cj["C"] = nlohmann::json::array();
    for (const auto& x : c.coefficients) coeffs.push_back(decimal(x));
    cuts.push_back(std::move(cj));
  }
  return j;
}

nlohmann::json bounds_to_json(const BoundsReport& report, const RunConfig& cfg, bool with_certificates) {
  nlohmann::json j;
  j["schema"] = "emm-bounds/1";
  j["config"] = config_to_json(cfg);
  j["order_convention"] = to_string(report.request.settings.order_convention);
  j["feasibility_tests"] = report.feasibility_tests;
  std::map<std::string, nlohmann::json> cache;  // merged intervals repeat across levels
  auto certificate = [&](const BigReal& e, const EnergyInterval& iv) {
    const std::string key = std::to_string(iv.p_max) + ":" + decimal(e);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto fc = report.request.settings.feasibility_for(iv.p_max);
    fc.collect_spectra = true;
    const auto r = feasibility_test(e, iv.p_max, fc);
    return cache[key] = feasibility_to_json(r, e, iv.order, iv.p_max, fc.precision);
  };
  auto& levels = j["levels"] = nlohmann::json::array();
  for (const auto& lb : report.levels) {
    nlohmann::json lj{{"level", lb.level}};
    auto& ivs = lj["intervals"] = nlohmann::json::array();
    for (const auto& iv : lb.intervals) {
      nlohmann::json ij{{"order", iv.order},
                        {"p_max", iv.p_max},
                        {"precision_bits", iv.precision.bits},
                        {"lower", decimal(iv.lower)},
                        {"upper", decimal(iv.upper)},
                        {"lower_inner", decimal(iv.lower_inner)},
                        {"upper_inner", decimal(iv.upper_inner)},
                        {"endpoint_tolerance", decimal(iv.endpoint_tolerance)},
                        {"width", decimal(iv.width())},
                        {"truncated_low", iv.truncated_low},
                        {"truncated_high", iv.truncated_high},
                        {"candidate_levels", iv.candidate_levels},
                        {"merged", iv.merged()}};
      if (with_certificates) {
        ij["certificates"] = {{"lower", certificate(iv.lower, iv)},
                              {"lower_inner", certificate(iv.lower_inner, iv)},
                              {"upper_inner", certificate(iv.upper_inner, iv)},
                              {"upper", certificate(iv.upper, iv)}};
      }
      ivs.push_back(std::move(ij));
    }
    levels.push_back(std::move(lj));
  }
  return j;
}

std::string bounds_to_csv(const BoundsReport& report) {
  std::ostringstream o;
  o << "level,p_max,E_L,E_U,width\n";
  for (const auto& lb : report.levels) {
    for (const auto& iv : lb.intervals) {
      o << lb.level << ',' << iv.p_max << ',' << decimal(iv.lower) << ',' << decimal(iv.upper) << ','
        << decimal(iv.width()) << '\n';
    }
  }
  return o.str();
}

std::string bounds_to_text(const BoundsReport& report) {
  std::ostringstream o;
  o << "order convention: " << to_string(report.request.settings.order_convention)
    << ", feasibility tests: " << report.feasibility_tests << "\n";
  for (const auto& lb : report.levels) {
    o << "\nlevel " << lb.level << "\n";
    o << "  order  p_max  bits  E_L  E_U\n";
    for (const auto& iv : lb.intervals) {
      // Printed outward: E_L rounded down, E_U rounded up, to the digits the tolerance supports.
      const int d = decimals_for(iv.endpoint_tolerance);
      o << "  " << iv.order << "  " << iv.p_max << "  " << iv.precision.bits << "  " << iv.lower.to_fixed(d, MPFR_RNDD)
        << "  " << iv.upper.to_fixed(d, MPFR_RNDU);
      if (iv.merged()) {
        o << "  (merged: levels";
        for (int c : iv.candidate_levels) o << ' ' << c;
        o << ')';
      }
      if (iv.truncated_low) o << "  (touches emin)";
      if (iv.truncated_high) o << "  (touches emax)";
      o << '\n';
    }
  }
  return o.str();
}

namespace {

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.output.empty()) {
    out << text;
    return;
  }
  std::ofstream f(cfg.output);
  if (!f) throw std::runtime_error("cannot open output file '" + cfg.output + "'");
  f << text;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  const BoundsReport report = bounds_table(cfg.bounds_request());
  if (cfg.format == "json") {
    emit(cfg, bounds_to_json(report, cfg, cfg.certificates).dump(2) + "\n", out);
  } else if (cfg.format == "csv") {
    emit(cfg, bounds_to_csv(report), out);
  } else {
    emit(cfg, bounds_to_text(report), out);
  }
  return exit_ok;
}

int cmd_feasible(const RunConfig& cfg, std::ostream& out) {
  const ScanSettings s = cfg.scan_settings();
  const int order = cfg.orders.front();
  const int p = stieltjes_p_max(order, s.order_convention);
  FeasibilityConfig fc = s.feasibility_for(p);
  fc.collect_spectra = true;
  BigReal e = parse(cfg.energy, "--energy");
  e.set_precision(fc.precision);
  const FeasibilityResult r = feasibility_test(e, p, fc);
  if (cfg.format == "json") {
    nlohmann::json j = feasibility_to_json(r, e, order, p, fc.precision);
    j["config"] = config_to_json(cfg);
    emit(cfg, j.dump(2) + "\n", out);
    return exit_ok;
  }
  std::ostringstream o;
  o << "E = " << cfg.energy << " at order " << order << " (Stieltjes p_max " << p << ", " << fc.precision.bits
    << " bits): " << (r.feasible ? "feasible" : "infeasible") << "\n";
  o << "  iterations " << r.iterations << ", cuts " << r.cuts_used.size() << ", final slack "
    << r.final_slack.to_string(6) << "\n";
  if (r.witness_point) {
    o << "  witness u1 u2 u3:";
    for (const auto& u : *r.witness_point) o << ' ' << u.to_string(12);
    o << "\n";
  }
  for (const auto& sp : r.min_eigenvalues) {
    o << "  min eigenvalue sigma=" << sp.sigma << " J=" << sp.order_j << ": " << sp.min_eigenvalue.to_string(6) << "\n";
  }
  emit(cfg, o.str(), out);
  return exit_ok;
}

struct Check {
  int level;
  std::string name;
  bool pass;
  std::string detail;
};

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  OracleSettings os;
  os.precision = PrecisionBits{cfg.oracle_bits};
  os.step = cfg.step;
  os.half_length = cfg.half_length;
  os.match_tolerance = cfg.match_tolerance;
  const ScanSettings ss = cfg.scan_settings();
  const BigReal shift(cfg.perturb_energy, os.precision);

  std::vector<Check> checks;
  std::vector<std::string> energies;
  for (int level = 0; level < cfg.levels; ++level) {
    auto add = [&](std::string name, bool pass, std::string detail) {
      checks.push_back({level, std::move(name), pass, std::move(detail)});
    };
    std::optional<OracleSolution> sol;
    try {
      sol = shoot_eigenvalue(BigReal(wkb_energy(level), os.precision), BigReal(1L, os.precision), os);
    } catch (const NewtonDivergence& e) {
      add("oracle", false, e.what());
      energies.emplace_back();
      continue;
    }
    std::ostringstream d;
    d << "E = " << sol->energy.to_string(16) << ", beta = " << sol->beta.to_string(10) << ", "
      << sol->newton_iterations << " Newton steps, |psi(L)|/max " << sol->end_mismatch;
    add("oracle", true, d.str());
    energies.push_back(decimal(sol->energy));

    OracleSolution checked = *sol;
    checked.energy += shift;
    const BigReal& e = checked.energy;

    const ResidualStats res = residual_check(checked, os);
    std::ostringstream rd;
    rd << "max " << res.max_relative << ", rms " << res.rms_relative << " over " << res.points << " points (limit "
       << cfg.residual_tolerance << ")";
    add("residual", res.max_relative <= cfg.residual_tolerance, rd.str());

    if (cfg.richardson) {
      OracleSettings half = os;
      half.step = os.step / 2;
      std::ostringstream hd;
      try {
        OracleSolution fine = shoot_eigenvalue(sol->energy, sol->beta, half);
        fine.energy += shift;
        const ResidualStats rf = residual_check(fine, half);
        const double ratio = res.max_relative / rf.max_relative;
        hd << "residual ratio " << ratio << " under h -> h/2 (band " << kRichardsonLow << ".." << kRichardsonHigh
           << "), eigenvalue drift " << abs(fine.energy - checked.energy).to_double();
        add("richardson", ratio >= kRichardsonLow && ratio <= kRichardsonHigh, hd.str());
      } catch (const NewtonDivergence& ex) {
        add("richardson", false, ex.what());
      }
    }

    const ReferenceMoments m = reference_moments(*sol, cfg.closure_rho + 1);
    const auto table = build_stieltjes_table(e, cfg.closure_rho);
    const std::array<BigReal, 4> seed{m.u[0], m.u[1], m.u[2], m.u[3]};
    double worst = 0.0;
    for (int rho = 4; rho <= cfg.closure_rho; ++rho) {
      const BigReal rel = abs(table.evaluate_raw(rho, seed) / m.u[static_cast<std::size_t>(rho)] - 1L);
      worst = std::max(worst, rel.to_double());
    }
    std::ostringstream cd;
    cd << "max relative error " << worst << " for rho <= " << cfg.closure_rho << " (limit " << cfg.closure_tolerance
       << "), quadrature error " << m.quadrature_error;
    add("recursion-closure", worst <= cfg.closure_tolerance, cd.str());

    const int p = stieltjes_p_max(cfg.witness_order, ss.order_convention);
    const FeasibilityConfig fc = ss.feasibility_for(p);
    BigReal ep = e;
    ep.set_precision(fc.precision);
    std::ostringstream fd;
    try {
      const auto fr = feasibility_test(ep, p, fc);
      MissingMoments u{m.u[1], m.u[2], m.u[3]};
      for (auto& x : u) x.set_precision(fc.precision);
      const auto sets = assemble_all(build_stieltjes_table(ep, p));
      BigReal least = BigReal(1L, fc.precision);
      for (const auto& ev : evaluate_candidate(sets, u, Scaling::diagonal)) least = min(least, ev.min_eigenvalue);
      fd << "order " << cfg.witness_order << ": " << (fr.feasible ? "feasible" : "infeasible")
         << "; oracle moments as witness, least scaled eigenvalue " << least.to_string(4);
      add("feasibility-closure", fr.feasible && least > 0L, fd.str());
    } catch (const IndeterminateError& ex) {
      add("feasibility-closure", false, ex.what());
    }
  }

  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  if (cfg.format == "json") {
    nlohmann::json j;
    j["schema"] = "emm-validate/1";
    j["config"] = config_to_json(cfg);
    j["energies"] = energies;
    auto& arr = j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) arr.push_back({{"level", c.level}, {"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["pass"] = all;
    emit(cfg, j.dump(2) + "\n", out);
  } else {
    std::ostringstream o;
    for (const auto& c : checks) {
      o << (c.pass ? "PASS" : "FAIL") << " level " << c.level << ' ' << c.name << ": " << c.detail << '\n';
    }
    o << (all ? "all checks passed" : "validation FAILED") << '\n';
    emit(cfg, o.str(), out);
  }
  return all ? exit_ok : exit_validation;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Eigenvalue moment method bounds for the -ix^3 potential"};
  app.set_config("--config", "", "Flat key = value file; keys are the long option names");
  app.require_subcommand(1);

  // Options live on the top-level app so a flat config file can set all of them.
  app.add_option("--pmax", cfg.orders, "Moment orders, comma separated")->delimiter(',');
  app.add_option("--levels", cfg.levels, "Number of levels (bounds, validate)")->capture_default_str();
  app.add_option("--emin", cfg.e_min, "Scan window start")->capture_default_str();
  app.add_option("--emax", cfg.e_max, "Scan window end")->capture_default_str();
  app.add_option("--grid-step", cfg.grid_step, "Coarse scan spacing")->capture_default_str();
  app.add_option("--precision", cfg.precision_bits, "Working precision in bits (default: 128 + 64 per 10 orders)");
  app.add_option("--convention", cfg.convention, "stieltjes-index or hamburger-index")->capture_default_str();
  app.add_option("--tol", cfg.endpoint_tolerances, "Absolute endpoint tolerance per order")->delimiter(',');
  app.add_option("--rel-tol", cfg.relative_tolerance, "Endpoint tolerance relative to width when --tol is absent")
      ->capture_default_str();
  app.add_option("--max-cuts", cfg.max_cuts, "Cut budget per feasibility test")->capture_default_str();
  app.add_option("--cut-policy", cfg.cut_policy, "first-violated or all-violated")->capture_default_str();
  app.add_option("--format", cfg.format, "text, csv or json")->capture_default_str();
  app.add_flag_callback("--json", [&] { cfg.format = "json"; }, "Same as --format json");
  app.add_flag_callback("--csv", [&] { cfg.format = "csv"; }, "Same as --format csv");
  app.add_option("--output,-o", cfg.output, "Write the report to a file");
  app.add_flag("!--no-certificates", cfg.certificates, "Omit endpoint certificates from JSON");
  app.add_option("--energy", cfg.energy, "Energy to test (feasible)");
  app.add_option("--oracle-precision", cfg.oracle_bits, "Oracle precision in bits")->capture_default_str();
  app.add_option("--step", cfg.step, "Oracle RK4 step")->capture_default_str();
  app.add_option("--length", cfg.half_length, "Oracle half-line length L")->capture_default_str();
  app.add_option("--match-tol", cfg.match_tolerance, "Oracle |psi(L)| / max |psi| target")->capture_default_str();
  app.add_option("--residual-tol", cfg.residual_tolerance, "Positivity-equation residual limit")->capture_default_str();
  app.add_option("--closure-tol", cfg.closure_tolerance, "Recursion closure limit")->capture_default_str();
  app.add_option("--closure-rho", cfg.closure_rho, "Highest moment index for the closure check")
      ->capture_default_str();
  app.add_option("--witness-order", cfg.witness_order, "Order for the feasibility closure check")
      ->capture_default_str();
  app.add_option("--perturb-energy", cfg.perturb_energy, "Shift the oracle energy before the checks")
      ->capture_default_str();
  app.add_flag("!--no-richardson", cfg.richardson, "Skip the step-halving check");

  auto* bounds = app.add_subcommand("bounds", "Bounds table over a set of orders");
  auto* feasible = app.add_subcommand("feasible", "Single feasibility test");
  auto* validate = app.add_subcommand("validate", "Shooting oracle and closure checks");
  for (auto* sub : {bounds, feasible, validate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_ok : exit_usage;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();

  try {
    cfg.validate();
    if (cfg.subcommand == "bounds") return cmd_bounds(cfg, out);
    if (cfg.subcommand == "feasible") return cmd_feasible(cfg, out);
    return cmd_validate(cfg, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const IndeterminateError& e) {
    err << "indeterminate: " << e.what() << "\n";
    return exit_indeterminate;
  } catch (const NestingViolation& e) {
    err << "nesting violation: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

}  // namespace emm::cli
