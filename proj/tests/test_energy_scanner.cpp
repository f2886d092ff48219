#include "doctest.h"

#include "emm/energy_scanner.hpp"

using namespace emm;

namespace {

const PrecisionBits P{192};

BigReal R(double x) { return BigReal(x, P); }

BoundsRequest small_request() {
  BoundsRequest req;
  req.levels = 2;
  req.orders = {12, 16};
  req.e_min = R(0.0);
  req.e_max = R(6.0);
  req.grid_step = R(0.05);
  return req;
}

const BoundsReport& small_report() {
  static const BoundsReport rep = bounds_table(small_request());
  return rep;
}

}  // namespace

TEST_CASE("order conventions") {
  CHECK(parse_order_convention("stieltjes-index") == OrderConvention::stieltjes_index);
  CHECK(parse_order_convention("hamburger-index") == OrderConvention::hamburger_index);
  CHECK_THROWS_AS(parse_order_convention("bogus"), std::invalid_argument);
  CHECK(to_string(OrderConvention::hamburger_index) == "hamburger-index");
  CHECK(stieltjes_p_max(20, OrderConvention::stieltjes_index) == 20);
  CHECK(stieltjes_p_max(20, OrderConvention::hamburger_index) == 10);
  CHECK(stieltjes_p_max(21, OrderConvention::hamburger_index) == 10);
}

TEST_CASE("default precision schedule") {
  CHECK(default_precision(10).bits == 192);
  CHECK(default_precision(20).bits == 256);
  CHECK(default_precision(21).bits == 320);
  CHECK(default_precision(30).bits == 320);
  ScanSettings s;
  CHECK(s.feasibility_for(40).precision.bits == 384);
  s.precision = PrecisionBits{512};
  CHECK(s.feasibility_for(40).precision.bits == 512);
}

TEST_CASE("coarse scan at low order covers the whole window") {
  const auto runs = scan_feasible_set(R(0.5), R(3.0), R(0.25), 5, ScanSettings{});
  REQUIRE(runs.size() == 1);
  CHECK(runs[0].truncated_low());
  CHECK(runs[0].truncated_high());
  CHECK(runs[0].first_feasible == R(0.5));
  CHECK(runs[0].last_feasible == R(3.0));
  // 0.3 / 0.05 is not exact in binary; the last grid point must still be e_max.
  const auto fine = scan_feasible_set(R(0.0), R(0.3), R(0.05), 3, ScanSettings{});
  REQUIRE(fine.size() == 1);
  CHECK(abs(fine[0].last_feasible - R(0.3)) < R(1e-12));
}

TEST_CASE("coarse scan isolates the ground state at order 12") {
  const auto runs = scan_feasible_set(R(0.0), R(3.0), R(0.02), 12, ScanSettings{});
  REQUIRE(runs.size() >= 1);
  const auto& g = runs.front();
  REQUIRE(g.infeasible_below);
  REQUIRE(g.infeasible_above);
  CHECK(*g.infeasible_below < R(1.156267));
  CHECK(g.first_feasible <= R(1.16));
  CHECK(g.last_feasible >= R(1.16));
  CHECK(*g.infeasible_above > R(1.156267));
  CHECK_THROWS_AS(scan_feasible_set(R(1), R(0), R(0.1), 5, ScanSettings{}), std::invalid_argument);
  CHECK_THROWS_AS(scan_feasible_set(R(0), R(1), R(0), 5, ScanSettings{}), std::invalid_argument);
}

TEST_CASE("refine_endpoint brackets the upper ground-state bound at order 20") {
  const BigReal tol = R(1e-6);
  const auto br = refine_endpoint(R(1.1563), R(1.20), 20, tol, ScanSettings{});
  CHECK(br.width() <= tol);
  CHECK(br.feasible < br.infeasible);
  CHECK(br.infeasible > R(1.156267072));
  CHECK(abs(br.infeasible - R(1.1564471)) < R(2e-6));
  // Both ends infeasible: not a bracket.
  CHECK_THROWS_AS(refine_endpoint(R(1.15), R(1.20), 20, tol, ScanSettings{}), std::runtime_error);
  CHECK_THROWS_AS(refine_endpoint(R(1.1563), R(1.20), 20, R(0), ScanSettings{}), std::invalid_argument);
}

TEST_CASE("bounds_table: two levels nest and contain the known energies") {
  const auto& rep = small_report();
  REQUIRE(rep.levels.size() == 2);
  const double known[] = {1.156267071988, 4.109228752806};
  for (int level = 0; level < 2; ++level) {
    const auto& lb = rep.levels[static_cast<std::size_t>(level)];
    CHECK(lb.level == level);
    REQUIRE(lb.intervals.size() == 2);
    for (const auto& iv : lb.intervals) {
      CHECK(iv.lower < R(known[level]));
      CHECK(iv.upper > R(known[level]));
      CHECK(iv.lower <= iv.lower_inner);
      CHECK(iv.upper_inner <= iv.upper);
      CHECK(iv.lower_inner - iv.lower <= iv.endpoint_tolerance);
      CHECK(iv.precision.bits == default_precision(iv.p_max).bits);
    }
    CHECK(lb.intervals[0].order == 12);
    CHECK(lb.intervals[1].order == 16);
    CHECK(lb.intervals[1].lower >= lb.intervals[0].lower);
    CHECK(lb.intervals[1].upper <= lb.intervals[0].upper);
  }
  CHECK(rep.feasibility_tests > 0);
  CHECK_NOTHROW(check_nesting(rep));
}

TEST_CASE("bounds_table: outward bounds are infeasible and inner bounds feasible") {
  const auto& rep = small_report();
  for (const auto& lb : rep.levels) {
    for (const auto& iv : lb.intervals) {
      FeasibilityProbe probe(iv.p_max, ScanSettings{});
      if (!iv.truncated_low) CHECK_FALSE(probe.feasible(iv.lower));
      if (!iv.truncated_high) CHECK_FALSE(probe.feasible(iv.upper));
      CHECK(probe.feasible(iv.lower_inner));
      CHECK(probe.feasible(iv.upper_inner));
    }
  }
}

TEST_CASE("bounds_table: merged low-order intervals carry every candidate level") {
  BoundsRequest req;
  req.levels = 3;
  req.orders = {10, 18};
  req.e_min = R(0.0);
  req.e_max = R(9.0);
  req.grid_step = R(0.05);
  const auto rep = bounds_table(req);
  REQUIRE(rep.levels.size() == 3);
  const auto& first = rep.levels[1].intervals.front();
  CHECK(first.order == 10);
  CHECK(first.merged());
  CHECK(first.candidate_levels == std::vector<int>{1, 2});
  CHECK(first.level_index == 1);
  for (const auto& lb : rep.levels) CHECK_FALSE(lb.intervals.back().merged());
}

TEST_CASE("bounds_table: a single high order finds an interval narrower than the grid") {
  BoundsRequest req;
  req.levels = 1;
  req.orders = {20};
  req.e_min = R(0.0);
  req.e_max = R(3.0);
  req.grid_step = BigReal("0.01", P);
  const auto rep = bounds_table(req);
  REQUIRE(rep.levels.size() == 1);
  REQUIRE(rep.levels[0].intervals.size() == 1);
  const auto& iv = rep.levels[0].intervals[0];
  CHECK(iv.width() < R(0.01));
  CHECK(iv.lower < R(1.156267072));
  CHECK(iv.upper > R(1.156267072));
}

TEST_CASE("hamburger-index orders map to half the Stieltjes order") {
  BoundsRequest req = small_request();
  req.levels = 1;
  req.orders = {24};
  req.e_max = R(2.0);
  req.settings.order_convention = OrderConvention::hamburger_index;
  const auto ham = bounds_table(req);
  REQUIRE(ham.levels.size() == 1);
  CHECK(ham.levels[0].intervals[0].p_max == 12);
  CHECK(ham.levels[0].intervals[0].order == 24);
  const auto& sti = small_report().levels[0].intervals[0];
  CHECK(abs(ham.levels[0].intervals[0].lower - sti.lower) <= max(sti.endpoint_tolerance, ham.levels[0].intervals[0].endpoint_tolerance) * 2L);
}

TEST_CASE("bounds_table validates its request") {
  auto bad = small_request();
  bad.orders = {16, 12};
  CHECK_THROWS_AS(bounds_table(bad), std::invalid_argument);
  bad = small_request();
  bad.orders = {20, 21};
  bad.settings.order_convention = OrderConvention::hamburger_index;
  CHECK_THROWS_AS(bounds_table(bad), std::invalid_argument);
  bad = small_request();
  bad.endpoint_tolerances = {R(1e-4)};
  CHECK_THROWS_AS(bounds_table(bad), std::invalid_argument);
  bad = small_request();
  bad.levels = 0;
  CHECK_THROWS_AS(bounds_table(bad), std::invalid_argument);
  bad = small_request();
  bad.orders = {2};
  CHECK_THROWS_AS(bounds_table(bad), std::invalid_argument);
}

TEST_CASE("check_nesting flags an interval that widens with order") {
  BoundsReport rep;
  LevelBounds lb;
  EnergyInterval a, b;
  a.order = 10;
  a.lower = R(1.0);
  a.upper = R(1.5);
  a.endpoint_tolerance = R(1e-6);
  b = a;
  b.order = 20;
  b.upper = R(1.6);
  lb.intervals = {a, b};
  rep.levels.push_back(lb);
  CHECK_THROWS_AS(check_nesting(rep), NestingViolation);
  rep.levels[0].intervals[1].upper = R(1.4);
  CHECK_NOTHROW(check_nesting(rep));
}
