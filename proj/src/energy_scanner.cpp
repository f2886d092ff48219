#include "emm/energy_scanner.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace emm {

std::string to_string(OrderConvention c) {
  return c == OrderConvention::stieltjes_index ? "stieltjes-index" : "hamburger-index";
}

OrderConvention parse_order_convention(const std::string& name) {
  if (name == "stieltjes-index" || name == "stieltjes") return OrderConvention::stieltjes_index;
  if (name == "hamburger-index" || name == "hamburger") return OrderConvention::hamburger_index;
  throw std::invalid_argument("unknown order convention '" + name + "'");
}

int stieltjes_p_max(int order, OrderConvention convention) {
  return convention == OrderConvention::stieltjes_index ? order : order / 2;
}

PrecisionBits default_precision(int p_max) {
  const int tens = std::max(0, (p_max + 9) / 10);
  return PrecisionBits{128 + 64L * tens};
}

FeasibilityConfig ScanSettings::feasibility_for(int p_max) const {
  FeasibilityConfig cfg;
  cfg.precision = precision.value_or(default_precision(p_max));
  cfg.max_cuts = max_cuts;
  cfg.cut_policy = cut_policy;
  cfg.collect_spectra = false;
  return cfg;
}

namespace {

constexpr std::size_t kPoolLimit = 160;
constexpr int kSeedOrder = 10;

}  // namespace

FeasibilityProbe::FeasibilityProbe(int p_max, const ScanSettings& settings, std::vector<CutSeed> pool)
    : p_max_(p_max), cfg_(settings.feasibility_for(p_max)), pool_(std::move(pool)) {}

bool FeasibilityProbe::feasible(const BigReal& energy) {
  const FeasibilityResult r = feasibility_test(energy, p_max_, cfg_, pool_);
  ++tests_;
  auto fresh = harvest_seeds(r);
  if (!fresh.empty()) {
    // Most recent cuts first; older ones drop off the end.
    fresh.insert(fresh.end(), pool_.begin(), pool_.end());
    if (fresh.size() > kPoolLimit) fresh.resize(kPoolLimit);
    pool_ = std::move(fresh);
  }
  return r.feasible;
}

std::vector<CoarseInterval> scan_feasible_set(const BigReal& e_min, const BigReal& e_max, const BigReal& grid_step,
                                              int p_max, const ScanSettings& settings) {
  FeasibilityProbe probe(p_max, settings);
  return scan_feasible_set(e_min, e_max, grid_step, probe);
}

std::vector<CoarseInterval> scan_feasible_set(const BigReal& e_min, const BigReal& e_max, const BigReal& grid_step,
                                              FeasibilityProbe& probe) {
  if (!(e_min < e_max)) throw std::invalid_argument("scan_feasible_set: e_min must be below e_max");
  if (!(grid_step > 0L)) throw std::invalid_argument("scan_feasible_set: grid_step must be positive");
  const PrecisionBits prec = probe.precision();
  BigReal span = e_max - e_min;
  span.set_precision(prec);
  // A window that is a whole number of steps keeps its last point despite rounding in the inputs.
  BigReal ratio = span / grid_step;
  ratio *= BigReal(1L, prec) + pow2(-30, prec);
  const long steps = ratio.to_long_floor();

  std::vector<CoarseInterval> runs;
  std::optional<BigReal> last_infeasible;
  std::optional<CoarseInterval> open;
  for (long k = 0; k <= steps; ++k) {
    BigReal e = e_min;
    e.set_precision(prec);
    e.add_product(grid_step, BigReal(k, prec));
    if (probe.feasible(e)) {
      if (!open) {
        open = CoarseInterval{e, e, last_infeasible, std::nullopt};
      } else {
        open->last_feasible = e;
      }
    } else {
      if (open) {
        open->infeasible_above = e;
        runs.push_back(std::move(*open));
        open.reset();
      }
      last_infeasible = e;
    }
  }
  if (open) runs.push_back(std::move(*open));
  return runs;
}

EndpointBracket bisect_endpoint(EndpointBracket bracket, const BigReal& tol, FeasibilityProbe& probe) {
  while (bracket.width() > tol) {
    BigReal mid = bracket.midpoint();
    if (probe.feasible(mid)) {
      bracket.feasible = std::move(mid);
    } else {
      bracket.infeasible = std::move(mid);
    }
  }
  return bracket;
}

EndpointBracket refine_endpoint(const BigReal& feasible_e, const BigReal& infeasible_e, int p_max, const BigReal& tol,
                                const ScanSettings& settings) {
  if (!(tol > 0L)) throw std::invalid_argument("refine_endpoint: tolerance must be positive");
  FeasibilityProbe probe(p_max, settings);
  const bool f = probe.feasible(feasible_e);
  const bool i = probe.feasible(infeasible_e);
  if (!f || i) {
    std::ostringstream msg;
    msg << "refine_endpoint: bracket verdicts are (" << (f ? "feasible" : "infeasible") << ", "
        << (i ? "feasible" : "infeasible") << "), expected (feasible, infeasible)";
    throw std::runtime_error(msg.str());
  }
  BigReal fe = feasible_e;
  BigReal ie = infeasible_e;
  fe.set_precision(probe.precision());
  ie.set_precision(probe.precision());
  return bisect_endpoint({fe, ie}, tol, probe);
}

namespace {

struct Track {
  int id = 0;
  BigReal lo_out, lo_in, hi_in, hi_out;
  bool trunc_lo = false;
  bool trunc_hi = false;
};

struct Recorded {
  int track = 0;
  std::size_t order_index = 0;
  EnergyInterval interval;
};

class Tracker {
 public:
  explicit Tracker(const BoundsRequest& req) : req_(req) {}

  int new_id(int parent) {
    const int id = next_id_++;
    parent_[id] = parent;
    return id;
  }

  bool descends(int leaf, int ancestor) const {
    for (int t = leaf; t >= 0; t = parent_.at(t)) {
      if (t == ancestor) return true;
    }
    return false;
  }

  // Refines each feasible run (given as grid verdicts over sorted points) into tracks.
  std::vector<Track> runs_to_tracks(const std::vector<BigReal>& pts, const std::vector<bool>& ok, bool low_is_domain,
                                    bool high_is_domain, const BigReal& tol_rel_base, bool final_tol,
                                    const BigReal& target_tol, FeasibilityProbe& probe, int parent) {
    std::vector<Track> out;
    const std::size_t n = pts.size();
    for (std::size_t a = 0; a < n; ++a) {
      if (!ok[a] || (a > 0 && ok[a - 1])) continue;
      std::size_t b = a;
      while (b + 1 < n && ok[b + 1]) ++b;
      const BigReal spacing = n > 1 ? abs(pts[std::min(n - 1, b + 1)] - pts[b > 0 ? b - 1 : 0]) / 2L : tol_rel_base;
      BigReal estimate = pts[b] - pts[a] + spacing;
      BigReal tol = final_tol ? target_tol : estimate / 32L;
      if (!final_tol && req_.endpoint_tolerances.empty()) {
        // Intermediate orders only have to seed the next grid.
        tol = estimate / 32L;
      } else if (final_tol && req_.endpoint_tolerances.empty()) {
        tol = estimate * BigReal(req_.relative_tolerance, probe.precision());
      }
      Track t;
      t.id = new_id(parent);
      if (a == 0 && low_is_domain) {
        t.trunc_lo = true;
        t.lo_out = pts[0];
        t.lo_in = pts[0];
      } else {
        const auto br = bisect_endpoint({pts[a], pts[a - 1]}, tol, probe);
        t.lo_out = br.infeasible;
        t.lo_in = br.feasible;
      }
      if (b == n - 1 && high_is_domain) {
        t.trunc_hi = true;
        t.hi_out = pts[n - 1];
        t.hi_in = pts[n - 1];
      } else {
        const auto br = bisect_endpoint({pts[b], pts[b + 1]}, tol, probe);
        t.hi_out = br.infeasible;
        t.hi_in = br.feasible;
      }
      last_tol_[t.id] = tol;
      out.push_back(std::move(t));
      a = b;
    }
    return out;
  }

  void record(const Track& t, std::size_t order_index, int p_max, PrecisionBits prec) {
    EnergyInterval iv;
    iv.order = req_.orders[order_index];
    iv.p_max = p_max;
    iv.lower = t.lo_out;
    iv.upper = t.hi_out;
    iv.lower_inner = t.lo_in;
    iv.upper_inner = t.hi_in;
    iv.endpoint_tolerance = last_tol_.at(t.id);
    iv.truncated_low = t.trunc_lo;
    iv.truncated_high = t.trunc_hi;
    iv.precision = prec;
    recorded_.push_back({t.id, order_index, std::move(iv)});
  }

  std::vector<LevelBounds> assign_levels(const std::vector<Track>& final_tracks) const {
    std::vector<LevelBounds> levels;
    for (std::size_t i = 0; i < final_tracks.size() && static_cast<int>(i) < req_.levels; ++i) {
      levels.push_back({static_cast<int>(i), {}});
    }
    for (const auto& rec : recorded_) {
      std::vector<int> cands;
      for (std::size_t i = 0; i < levels.size(); ++i) {
        if (descends(final_tracks[i].id, rec.track)) cands.push_back(static_cast<int>(i));
      }
      if (cands.empty()) continue;
      for (int level : cands) {
        EnergyInterval iv = rec.interval;
        iv.level_index = level;
        iv.candidate_levels = cands;
        levels[static_cast<std::size_t>(level)].intervals.push_back(std::move(iv));
      }
    }
    return levels;
  }

 private:
  const BoundsRequest& req_;
  int next_id_ = 0;
  std::map<int, int> parent_;
  std::map<int, BigReal> last_tol_;
  std::vector<Recorded> recorded_;
};

void validate(const BoundsRequest& req) {
  if (req.levels < 1) throw std::invalid_argument("bounds_table: levels must be positive");
  if (req.orders.empty()) throw std::invalid_argument("bounds_table: no orders requested");
  for (std::size_t k = 1; k < req.orders.size(); ++k) {
    if (req.orders[k] <= req.orders[k - 1]) throw std::invalid_argument("bounds_table: orders must strictly increase");
    if (stieltjes_p_max(req.orders[k], req.settings.order_convention) <=
        stieltjes_p_max(req.orders[k - 1], req.settings.order_convention)) {
      throw std::invalid_argument("bounds_table: two orders map to the same Stieltjes index");
    }
  }
  if (stieltjes_p_max(req.orders.front(), req.settings.order_convention) < kMissingOrder) {
    throw std::invalid_argument("bounds_table: order too small (Stieltjes p_max must be at least 3)");
  }
  if (!(req.e_min < req.e_max)) throw std::invalid_argument("bounds_table: e_min must be below e_max");
  if (!(req.grid_step > 0L)) throw std::invalid_argument("bounds_table: grid step must be positive");
  if (!req.endpoint_tolerances.empty()) {
    if (req.endpoint_tolerances.size() != req.orders.size()) {
      throw std::invalid_argument("bounds_table: one endpoint tolerance per order expected");
    }
    for (const auto& t : req.endpoint_tolerances) {
      if (!(t > 0L)) throw std::invalid_argument("bounds_table: tolerances must be positive");
    }
  }
  if (!(req.relative_tolerance > 0.0)) throw std::invalid_argument("bounds_table: relative tolerance must be positive");
}

void keep_lowest(std::vector<Track>& tracks, int levels) {
  std::sort(tracks.begin(), tracks.end(), [](const Track& a, const Track& b) { return a.lo_out < b.lo_out; });
  // Each track holds at least one level, so anything past the first `levels` is higher up.
  if (static_cast<int>(tracks.size()) > levels) tracks.resize(static_cast<std::size_t>(levels));
}

}  // namespace

BoundsReport bounds_table(const BoundsRequest& req) {
  validate(req);
  const OrderConvention conv = req.settings.order_convention;
  std::vector<int> targets;
  for (int order : req.orders) targets.push_back(stieltjes_p_max(order, conv));

  Tracker tracker(req);
  BoundsReport report;
  report.request = req;

  auto target_tol = [&](std::size_t k, PrecisionBits prec) {
    if (req.endpoint_tolerances.empty()) return BigReal(prec);
    BigReal t = req.endpoint_tolerances[k];
    t.set_precision(prec);
    return t;
  };

  // Coarse scan of the whole domain at a low order, where every level is wider than the grid;
  // higher first targets are reached by tracking.
  const int seed_order = std::min(targets[0], kSeedOrder);
  const bool seed_is_target = seed_order == targets[0];
  FeasibilityProbe probe(seed_order, req.settings);
  const PrecisionBits prec0 = probe.precision();
  std::vector<Track> tracks;
  {
    BigReal lo = req.e_min, hi = req.e_max, step = req.grid_step;
    lo.set_precision(prec0);
    hi.set_precision(prec0);
    step.set_precision(prec0);
    const auto runs = scan_feasible_set(lo, hi, step, probe);
    for (const auto& run : runs) {
      std::vector<BigReal> pts;
      std::vector<bool> ok;
      const bool low_domain = run.truncated_low();
      const bool high_domain = run.truncated_high();
      if (!low_domain) {
        pts.push_back(*run.infeasible_below);
        ok.push_back(false);
      }
      pts.push_back(run.first_feasible);
      ok.push_back(true);
      if (run.last_feasible != run.first_feasible) {
        pts.push_back(run.last_feasible);
        ok.push_back(true);
      }
      if (!high_domain) {
        pts.push_back(*run.infeasible_above);
        ok.push_back(false);
      }
      auto made = tracker.runs_to_tracks(pts, ok, low_domain, high_domain, step, seed_is_target,
                                         target_tol(0, prec0), probe, -1);
      tracks.insert(tracks.end(), made.begin(), made.end());
    }
    keep_lowest(tracks, req.levels);
    if (seed_is_target) {
      for (const auto& t : tracks) tracker.record(t, 0, targets[0], prec0);
    }
  }
  report.feasibility_tests += probe.tests();

  auto grid_step_at = [&](PrecisionBits prec) {
    BigReal s = req.grid_step;
    s.set_precision(prec);
    return s;
  };

  std::size_t next_target = seed_is_target ? 1 : 0;
  std::vector<CutSeed> pool = probe.pool();
  for (int p = seed_order + 1; next_target < targets.size() && p <= targets.back(); ++p) {
    FeasibilityProbe step_probe(p, req.settings, pool);
    const PrecisionBits prec = step_probe.precision();
    const bool is_target = p == targets[next_target];
    std::vector<Track> next;
    for (const auto& parent : tracks) {
      std::vector<BigReal> pts;
      std::vector<bool> ok;
      bool any = false;
      BigReal lo = parent.lo_out, hi = parent.hi_out;
      lo.set_precision(prec);
      hi.set_precision(prec);
      // Never coarser than the first-order grid, so a narrow piece splitting off a wide merged
      // interval is not stepped over.
      const long by_step = ((hi - lo) / grid_step_at(prec)).to_long_floor() + 1;
      const int first_n = static_cast<int>(std::max<long>(req.settings.nested_grid_points, by_step));
      for (int n = first_n; !any; n *= 2) {
        if (n > std::max(first_n, req.settings.nested_grid_limit)) {
          std::ostringstream msg;
          msg << "bounds_table: no feasible energy left in [" << lo.to_string(12) << ", " << hi.to_string(12)
              << "] at Stieltjes order " << p;
          throw std::runtime_error(msg.str());
        }
        pts.clear();
        ok.clear();
        // Domain-truncated sides are retested; otherwise the parent's outer bound is already
        // infeasible at this order by monotonicity.
        pts.push_back(lo);
        ok.push_back(parent.trunc_lo ? step_probe.feasible(lo) : false);
        const BigReal h = (hi - lo) / static_cast<long>(n + 1);
        for (int k = 1; k <= n; ++k) {
          BigReal e = lo;
          e.add_product(h, BigReal(static_cast<long>(k), prec));
          ok.push_back(step_probe.feasible(e));
          pts.push_back(std::move(e));
        }
        pts.push_back(hi);
        ok.push_back(parent.trunc_hi ? step_probe.feasible(hi) : false);
        any = std::find(ok.begin(), ok.end(), true) != ok.end();
      }
      auto made = tracker.runs_to_tracks(pts, ok, parent.trunc_lo && ok.front(), parent.trunc_hi && ok.back(),
                                         parent.hi_out - parent.lo_out, is_target,
                                         target_tol(next_target, prec), step_probe, parent.id);
      next.insert(next.end(), made.begin(), made.end());
    }
    keep_lowest(next, req.levels);
    tracks = std::move(next);
    if (is_target) {
      for (const auto& t : tracks) tracker.record(t, next_target, p, prec);
      ++next_target;
    }
    report.feasibility_tests += step_probe.tests();
    pool = step_probe.pool();
  }

  report.levels = tracker.assign_levels(tracks);
  check_nesting(report);
  return report;
}

void check_nesting(const BoundsReport& report) {
  for (const auto& level : report.levels) {
    for (std::size_t k = 1; k < level.intervals.size(); ++k) {
      const auto& prev = level.intervals[k - 1];
      const auto& cur = level.intervals[k];
      const BigReal slack = max(prev.endpoint_tolerance, cur.endpoint_tolerance);
      if (cur.lower + slack < prev.lower || cur.upper > prev.upper + slack) {
        std::ostringstream msg;
        msg << "nesting violated for level " << level.level << " between orders " << prev.order << " and "
            << cur.order << ": [" << prev.lower.to_string(15) << ", " << prev.upper.to_string(15) << "] vs ["
            << cur.lower.to_string(15) << ", " << cur.upper.to_string(15) << "]";
        throw NestingViolation(msg.str());
      }
    }
  }
}

}  // namespace emm
