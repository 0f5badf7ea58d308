#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "lngopt/generator.hpp"
#include "lngopt/node_mip.hpp"
#include "lngopt/validator.hpp"
#include "node_oracle.hpp"

using namespace lngopt;

namespace {

Instance tiny(std::uint64_t seed) {
  GeneratorParams p;
  p.n_vessels = 1 + static_cast<int>(seed % 2);
  p.n_buy = 2 + static_cast<int>(seed % 2);
  p.n_sell = 6 - p.n_buy;
  p.horizon_days = 60;
  p.n_ports = 4;
  return generate_instance(seed, p);
}

std::size_t count_prefix(const MilpModel& m, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& v : m.variables()) n += v.id.rfind(prefix, 0) == 0;
  return n;
}

bool has_row(const MilpModel& m, const std::string& prefix) {
  for (const auto& r : m.constraints())
    if (r.name.rfind(prefix, 0) == 0) return true;
  return false;
}

void expect_clean(const NodeSolution& sol, const Instance& inst, const NodeModelSets& sets,
                  const NodeSubproblem& sub = {}) {
  for (const auto& a : audit_node_solution(sol, inst, sets, sub)) ADD_FAILURE() << a;
  const auto rep = validate(sol.schedule, inst, ValidationMode::node);
  EXPECT_TRUE(rep.ok()) << rep.summary(5);
  EXPECT_NEAR(evaluate_profit(sol.schedule, inst, ValidationMode::node).net, sol.objective,
              1e-6 * std::max(1.0, std::abs(sol.objective)));
}

// One buy at P0 on day 1 and one sell at P1 on day 12; 2400 nm at 10 kn is
// exactly 10 days.
fixtures::Builder buy_sell() {
  fixtures::Builder b(30);
  b.vessel("V1");
  b.buy("B", 0, 1, 1, 120000, 140000, 100.0);
  b.sell("S", 1, 12, 12, 100000, 135000, 150.0);
  return b;
}

}  // namespace

TEST(NodeSets, Thresholds) {
  fixtures::Builder b(40);
  b.vessel("V1", 100000.0);
  b.buy("huge", 0, 1, 1, 99000, 99500, 100.0);        // v_min > 0.985 cap
  b.buy("b1", 0, 3, 3, 60000, 70000, 100.0);
  b.buy("b2", 0, 5, 5, 50000, 60000, 100.0);          // 60000 + 50000 - burn > 98500
  b.sell("slot", 1, 20, 20, 0, 30000, 150.0);
  b.sell("late", 1, 2, 2, 10000, 20000, 150.0);       // before b1: T < 0
  const Instance inst = b.build();
  const auto s = build_node_sets(inst);
  EXPECT_TRUE(s.impossible(0, 0));
  EXPECT_TRUE(s.first_forbidden(0, 0));
  EXPECT_FALSE(s.impossible(0, 1));
  EXPECT_TRUE(s.successor_forbidden(0, 1, 2));
  EXPECT_TRUE(s.later_forbidden(0, 1, 4));
  EXPECT_EQ(s.speed(0, 1, 4), 0.0);
  EXPECT_TRUE(s.slot(3));
  EXPECT_FALSE(s.slot(4));
  EXPECT_TRUE(s.first_forbidden(0, 3));
  // 2400 nm in T = 20 - 3 - 1 = 16 days: the slowest (10 kn) laden row.
  EXPECT_EQ(s.T(1, 3), 16);
  EXPECT_EQ(s.speed(0, 1, 3), 10.0);
  EXPECT_NEAR(s.burn(0, 1, 3), 24.0 * (1.1 * 0.02 * 100 + 2.0) * 16 + 100.0, 1e-9);
}

TEST(NodeSets, ContractsOutsideRentAreImpossible) {
  fixtures::Builder b(40);
  b.vessel("V1", 150000.0, 5, 30);
  b.buy("early", 0, 1, 3, 1000, 2000, 1.0);
  b.buy("inside", 0, 6, 8, 1000, 2000, 1.0);
  const auto s = build_node_sets(b.build());
  EXPECT_TRUE(s.impossible(0, 0));
  EXPECT_FALSE(s.impossible(0, 1));
}

TEST(NodeSets, RandomPairsMatchFormulas) {
  const Instance inst = tiny(17);
  const auto s = build_node_sets(inst);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> pick(0, inst.contracts.size() - 1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t i = pick(rng), j = pick(rng);
    const auto& a = inst.contracts[i];
    const auto& c = inst.contracts[j];
    const int T = c.release - a.release + (c.deadline - c.release) / 2 - (a.deadline - a.release) / 2 - 1;
    ASSERT_EQ(s.T(i, j), T);
    for (std::size_t k = 0; k < inst.vessels.size(); ++k) {
      const auto& v = inst.vessels[k];
      const double S = inst.distance(a.port, c.port);
      double want = 0.0;
      if (T >= 0 && (S == 0.0 || T > 0)) {
        const double needed = S == 0.0 ? 0.0 : S / (24.0 * T);
        for (const auto& r : v.consumption)
          if (r.fuel_mode == FuelMode::lng_only && r.laden == a.is_buy() && r.speed >= needed * (1 - 1e-12) &&
              (want == 0.0 || r.speed < want))
            want = r.speed;
      }
      EXPECT_EQ(s.speed(k, i, j), want);
      EXPECT_EQ(s.later_forbidden(k, i, j), want == 0.0);
      if (want > 0.0) {
        const double RT = s.rate(k, i, j) * T, cap = 0.985 * v.capacity;
        bool m = RT > 0.25 * v.capacity;
        if (a.is_buy() && c.is_buy() && a.v_min + c.v_min - RT > cap) m = true;
        if (a.is_sell() && c.is_sell() && a.v_min + c.v_min + RT > cap) m = true;
        EXPECT_EQ(s.successor_forbidden(k, i, j), m);
      }
    }
  }
}

TEST(NodeModel, VariableCounts) {
  const Instance inst = buy_sell().build();
  const auto sets = build_node_sets(inst);
  const MilpModel m = build_node_model(inst, sets, 2);
  EXPECT_EQ(count_prefix(m, "x_"), 4u);
  EXPECT_EQ(count_prefix(m, "V_"), 4u);
  EXPECT_EQ(count_prefix(m, "kappa_"), 3u);
  EXPECT_EQ(count_prefix(m, "L_"), 3u);
  // Only B at step 0 followed by S at step 1 survives the sets and C10.
  EXPECT_EQ(count_prefix(m, "z_"), 1u);
  EXPECT_TRUE(m.find_variable("z_0_1_0_0").has_value());
  EXPECT_TRUE(has_row(m, "C10_1_0_0"));
}

TEST(NodeModel, ForbiddenSetsBecomeRows) {
  fixtures::Builder b(40);
  b.vessel("V1", 100000.0);
  b.buy("huge", 0, 1, 1, 99000, 99500, 100.0);
  b.buy("b1", 0, 3, 3, 60000, 70000, 100.0);
  b.buy("b2", 0, 5, 5, 50000, 60000, 100.0);
  const Instance inst = b.build();
  const auto sets = build_node_sets(inst);
  const MilpModel m = build_node_model(inst, sets, 3);
  EXPECT_TRUE(has_row(m, "C9_0_0_1"));
  EXPECT_TRUE(has_row(m, "C5m_0_1_2_0"));
}

TEST(NodeMip, SingleBuySell) {
  const Instance inst = buy_sell().build();
  const auto sets = build_node_sets(inst);
  const auto sol = solve_full(inst);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  // Buy as much as the sell can take plus the leg burn, within band and cap.
  const double burn = sets.burn(0, 0, 1);
  const double vb = 135000 + burn;  // below 0.985 * 150000
  EXPECT_NEAR(sol.objective, 150.0 * 135000 - 100.0 * vb, 1e-3);
  ASSERT_EQ(sol.steps[0][0].contract, 0u);
  ASSERT_EQ(sol.steps[0][1].contract, 1u);
  expect_clean(sol, inst, sets);
}

TEST(NodeMip, AllPairsInfeasibleGivesZero) {
  fixtures::Builder b(30);
  b.vessel("V1");
  b.buy("B", 0, 10, 10, 120000, 140000, 100.0);
  b.sell("S", 1, 12, 12, 100000, 135000, 150.0);  // 2400 nm in one day
  const Instance inst = b.build();
  const auto sol = solve_full(inst);
  EXPECT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.objective, 0.0, 1e-9);
  EXPECT_EQ(sol.schedule.num_calls(), 0u);
}

TEST(NodeMip, MatchesRouteEnumeration) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const Instance inst = tiny(seed);
    const auto sets = build_node_sets(inst);
    const auto sol = solve_full(inst);
    ASSERT_EQ(sol.status, SolveStatus::optimal) << seed;
    const double want = oracle::best_objective(inst, sets, sol.n_steps);
    EXPECT_NEAR(sol.objective, want, 1e-6 * std::max(1.0, std::abs(want))) << "seed " << seed;
    expect_clean(sol, inst, sets);
  }
}

TEST(NodeMip, LinearizationMatchesBilinearEnumeration) {
  // One vessel, three contracts, three steps: nine x binaries. Every x
  // assignment obeying C5-C10 is a route; its loads follow the bilinear C1.
  int positive = 0;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> price(80.0, 160.0);
  std::uniform_int_distribution<int> day(0, 50);
  for (int trial = 0; trial < 8; ++trial) {
    fixtures::Builder b(60, {0.0, 1200.0, 2400.0});
    b.vessel("V1");
    const int d0 = day(rng) / 5;
    b.buy("B", 0, d0, d0, 60000, 140000, 100.0);
    const int d1 = d0 + 6 + day(rng) / 5, d2 = d1 + 6 + day(rng) / 10;
    if (trial % 2)
      b.sell("S1", 1, d1, d1, 0, 70000, price(rng));
    else
      b.buy("B2", 1, d1, d1, 5000, 40000, price(rng) - 40.0);
    b.sell("S2", 2, d2, d2, 40000, 140000, price(rng));
    const Instance inst = b.build();
    const auto sets = build_node_sets(inst);
    NodeOptions o;
    o.n_steps = 3;
    const auto sol = solve_full(inst, o);
    double best = 0.0;
    for (unsigned bits = 0; bits < (1u << 9); ++bits) {
      // x[i][q] = bit 3q + i
      auto x = [&](std::size_t i, std::size_t q) { return (bits >> (3 * q + i)) & 1u; };
      bool ok = true;
      std::vector<std::size_t> route;
      for (std::size_t q = 0; q < 3 && ok; ++q) {
        int here = 0;
        for (std::size_t i = 0; i < 3; ++i) here += static_cast<int>(x(i, q));
        if (here > 1) ok = false;
        for (std::size_t i = 0; i < 3; ++i)
          if (x(i, q)) route.push_back(i);
        if (q > 0 && here > 0 && route.size() != q + 1) ok = false;  // C8
      }
      if (!ok || !oracle::route_allowed(sets, 0, route)) continue;
      std::vector<std::size_t> sorted = route;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;  // C7
      best = std::max(best, oracle::route_value(inst, sets, 0, route));
    }
    EXPECT_NEAR(sol.objective, best, 1e-6 * std::max(1.0, best)) << trial;
    positive += best > 0.0;
  }
  EXPECT_GE(positive, 2);
}

TEST(NodeDecomposition, ShortHorizonEqualsFull) {
  const Instance inst = tiny(5);
  const auto full = solve_full(inst);
  const auto dec = solve_decomposed(inst);
  EXPECT_EQ(dec.windows, 1u);
  EXPECT_NEAR(dec.objective, full.objective, 1e-6 * std::max(1.0, full.objective));
}

TEST(NodeDecomposition, NeverBeatsFullSolve) {
  int productive = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorParams p;
    p.n_vessels = 1 + static_cast<int>(seed % 2);
    p.n_buy = 3;
    p.n_sell = 4;
    p.horizon_days = 80;
    p.n_ports = 4;
    const Instance inst = generate_instance(seed + 300, p);
    NodeOptions o;
    o.window_days = 40;
    const auto full = solve_full(inst, o);
    const auto dec = solve_decomposed(inst, o);
    ASSERT_EQ(full.status, SolveStatus::optimal);
    EXPECT_EQ(dec.windows, 2u);
    EXPECT_LE(dec.objective, full.objective + 1e-6 * std::max(1.0, full.objective)) << seed;
    const auto rep = validate(dec.schedule, inst, ValidationMode::node);
    EXPECT_TRUE(rep.ok()) << seed << " " << rep.summary(5);
    productive += dec.objective > 0.0;
  }
  EXPECT_GE(productive, 3);
}

TEST(NodeDecomposition, IdleVesselStartsFresh) {
  // Nothing profitable in the first window; the second window starts from
  // an empty tank with no fixed first visit.
  fixtures::Builder b(60);
  b.vessel("V1");
  b.buy("B0", 0, 1, 1, 120000, 140000, 500.0);
  b.sell("S0", 1, 12, 12, 100000, 135000, 150.0);
  b.buy("B1", 0, 31, 31, 120000, 140000, 100.0);
  b.sell("S1", 1, 42, 42, 100000, 135000, 150.0);
  const Instance inst = b.build();
  NodeOptions o;
  o.window_days = 30;
  const auto dec = solve_decomposed(inst, o);
  ASSERT_EQ(dec.windows, 2u);
  const auto& calls = dec.schedule.vessels[0].calls;
  ASSERT_EQ(calls.size(), 2u);
  EXPECT_EQ(calls[0].contract, 2u);
  EXPECT_EQ(dec.schedule.vessels[0].start_volume, 0.0);
  EXPECT_NEAR(dec.objective, solve_full(inst).objective, 1e-3);
}

TEST(NodeMip, AnchorIsHonoured) {
  const Instance inst = buy_sell().build();
  const auto sets = build_node_sets(inst);
  NodeSubproblem sub;
  sub.anchors = {{0, 130000.0}};
  const auto sol = solve_node(inst, sets, sub, {});
  ASSERT_EQ(sol.steps[0][0].contract, 0u);
  EXPECT_NEAR(sol.steps[0][0].volume, 130000.0, 1e-6);
  // The anchor is already paid for: only the sale counts.
  EXPECT_NEAR(sol.objective, 150.0 * (130000.0 - sets.burn(0, 0, 1)), 1e-3);
  for (const auto& a : audit_node_solution(sol, inst, sets, sub)) ADD_FAILURE() << a;
}

TEST(NodeMip, OversizedModelIsSkipped) {
  const Instance inst = tiny(3);
  NodeOptions o;
  o.max_binaries = 5;
  const auto sol = solve_full(inst, o);
  EXPECT_EQ(sol.status, SolveStatus::budget_exhausted);
  EXPECT_FALSE(sol.note.empty());
}
