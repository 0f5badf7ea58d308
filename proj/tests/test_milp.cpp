#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "lngopt/milp.hpp"
#include "milp_oracle.hpp"
#include "simplex.hpp"

using namespace lngopt;

using milp_oracle::brute_force;
using milp_oracle::random_model;

TEST(MilpBuild, EmptySpecIsOptimalAtZero) {
  MilpModel m = build(ModelSpec{});
  EXPECT_EQ(m.num_variables(), 0u);
  auto s = solve(m);
  EXPECT_EQ(s.status, SolveStatus::optimal);
  EXPECT_DOUBLE_EQ(s.objective, 0.0);
}

TEST(MilpBuild, RejectsDuplicatesAndUnknownReferences) {
  ModelSpec dup;
  dup.variables = {{"a", VarKind::binary}, {"a", VarKind::continuous}};
  EXPECT_THROW(build(dup), ModelError);
  ModelSpec unknown;
  unknown.variables = {{"a", VarKind::binary}};
  unknown.constraints = {{"r", {{"zz", 1.0}}, Comparator::le, 1.0}};
  EXPECT_THROW(build(unknown), ModelError);
}

TEST(MilpBuild, BinaryBoundsForced) {
  ModelSpec spec;
  spec.variables = {{"a", VarKind::binary, -5.0, 7.0, 1.0}};
  auto m = build(spec);
  EXPECT_EQ(m.variables()[0].lower, 0.0);
  EXPECT_EQ(m.variables()[0].upper, 1.0);
}

MilpModel knapsack() {
  ModelSpec spec;
  spec.variables = {{"item1", VarKind::binary, 0, 1, 6.0}, {"item2", VarKind::binary, 0, 1, 10.0}};
  spec.constraints = {{"cap", {{"item1", 5.0}, {"item2", 4.0}}, Comparator::le, 8.0}};
  return build(spec);
}

TEST(MilpSolve, Knapsack) {
  auto m = knapsack();
  EXPECT_EQ(m.num_binaries(), 2u);
  EXPECT_EQ(m.num_constraints(), 1u);
  auto s = solve(m);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.objective, 10.0, 1e-9);
  EXPECT_EQ(s.value(m, "item1"), 0.0);
  EXPECT_EQ(s.value(m, "item2"), 1.0);
}

TEST(MilpSolve, InfeasibleBinary) {
  MilpModel m;
  auto x = m.add_binary("x", 1.0);
  m.add_constraint("ge", {{x, 1.0}}, Comparator::ge, 1.0);
  m.add_constraint("le", {{x, 1.0}}, Comparator::le, 0.0);
  EXPECT_EQ(solve(m).status, SolveStatus::infeasible);
}

TEST(MilpSolve, IntegralRelaxationNeedsNoBranching) {
  // 3x3 assignment: the LP relaxation is integral.
  const double w[3][3] = {{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  MilpModel m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m.add_binary("a" + std::to_string(i) + std::to_string(j), w[i][j]);
  for (int i = 0; i < 3; ++i) {
    std::vector<LinearTerm> r, c;
    for (int j = 0; j < 3; ++j) {
      r.push_back({static_cast<std::size_t>(3 * i + j), 1.0});
      c.push_back({static_cast<std::size_t>(3 * j + i), 1.0});
    }
    m.add_constraint("row" + std::to_string(i), r, Comparator::eq, 1.0);
    m.add_constraint("col" + std::to_string(i), c, Comparator::eq, 1.0);
  }
  bool feasible = false;
  double oracle = brute_force(m, &feasible);
  auto s = solve(m);
  ASSERT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.objective, oracle, 1e-9);
  EXPECT_EQ(s.nodes, 1u);
}

TEST(MilpSolve, UnboundedContinuous) {
  MilpModel m;
  m.add_continuous("x", 0.0, kInfinity, 1.0);
  EXPECT_EQ(solve(m).status, SolveStatus::unbounded);
}

TEST(MilpSolve, RandomModelsMatchEnumeration) {
  std::mt19937_64 rng(20240531);
  int feasible_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    int n_bin = std::uniform_int_distribution<int>(1, 12)(rng);
    int n_cont = std::uniform_int_distribution<int>(0, n_bin > 8 ? 1 : 2)(rng);
    int n_rows = std::uniform_int_distribution<int>(1, 6)(rng);
    auto m = random_model(rng, n_bin, n_cont, n_rows);
    bool feasible = false;
    double oracle = brute_force(m, &feasible);
    auto s = solve(m);
    if (!feasible) {
      EXPECT_EQ(s.status, SolveStatus::infeasible) << "trial " << trial;
      continue;
    }
    ++feasible_count;
    ASSERT_EQ(s.status, SolveStatus::optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, oracle, 1e-6) << "trial " << trial;
    EXPECT_LE(m.max_violation(s.values), 1e-6);
    for (std::size_t j = 0; j < m.num_variables(); ++j)
      if (m.variables()[j].kind == VarKind::binary) EXPECT_TRUE(s.values[j] == 0.0 || s.values[j] == 1.0);
  }
  EXPECT_GT(feasible_count, 100);
}

TEST(MilpSolve, Deterministic) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_model(rng, 12, 2, 5);
    auto a = solve(m);
    auto b = solve(m);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.nodes, b.nodes);
  }
}

TEST(MilpSolve, IncumbentAndWarmBasisKeepOptimum) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto m = random_model(rng, 10, 2, 5);
    auto cold = solve(m);
    if (!cold.has_solution()) continue;
    SolveOptions opt;
    opt.incumbent = cold.values;
    opt.warm_basis = cold.root_basis;
    auto warm = solve(m, opt);
    ASSERT_EQ(warm.status, SolveStatus::optimal);
    EXPECT_NEAR(warm.objective, cold.objective, 1e-9);
  }
}

TEST(MilpSolve, NodeLimitReportsGap) {
  std::mt19937_64 rng(3);
  MilpModel m;
  std::vector<LinearTerm> w;
  for (int j = 0; j < 30; ++j) {
    m.add_binary("i" + std::to_string(j), std::uniform_int_distribution<int>(10, 40)(rng));
    w.push_back({static_cast<std::size_t>(j), static_cast<double>(std::uniform_int_distribution<int>(10, 40)(rng))});
  }
  m.add_constraint("cap", w, Comparator::le, 301.5);
  SolveOptions opt;
  opt.node_limit = 3;
  auto s = solve(m, opt);
  EXPECT_TRUE(s.status == SolveStatus::budget_exhausted || s.status == SolveStatus::optimal);
  EXPECT_GE(s.bound, s.objective - 1e-9);
  if (s.has_solution()) EXPECT_LE(m.max_violation(s.values), 1e-6);
}

TEST(LpEngine, RandomLpsMatchVertexEnumeration) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = random_model(rng, 0, std::uniform_int_distribution<int>(1, 4)(rng),
                          std::uniform_int_distribution<int>(1, 6)(rng));
    bool feasible = false;
    double oracle = brute_force(m, &feasible);
    auto s = solve(m);
    if (!feasible) {
      EXPECT_EQ(s.status, SolveStatus::infeasible) << trial;
      continue;
    }
    ASSERT_EQ(s.status, SolveStatus::optimal) << trial;
    EXPECT_NEAR(s.objective, oracle, 1e-7) << trial;
  }
}

TEST(LpFormat, KnapsackSections) {
  std::string text = export_lp(knapsack());
  EXPECT_NE(text.find("Maximize"), std::string::npos);
  EXPECT_NE(text.find("Subject To"), std::string::npos);
  EXPECT_NE(text.find("Binaries"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
}

TEST(LpFormat, EmptyModelRoundTrips) {
  std::string text = export_lp(MilpModel{});
  auto back = parse_lp(text);
  EXPECT_EQ(back.num_variables(), 0u);
  EXPECT_EQ(solve(back).status, SolveStatus::optimal);
}

TEST(LpFormat, RoundTripPreservesOptimum) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    auto m = random_model(rng, 8, 2, 5);
    m.set_objective_constant(trial * 0.25 - 3.0);
    auto back = parse_lp(export_lp(m));
    auto a = solve(m);
    auto b = solve(back);
    ASSERT_EQ(a.status, b.status) << trial;
    if (a.has_solution()) EXPECT_NEAR(a.objective, b.objective, 1e-9) << trial;
  }
}

TEST(LpFormat, ParsesCommonVariants) {
  const char* text = R"(\ comment
Minimize
 cost: 2 x + 3 y - z
st
 c1: x + y
     >= 2
 -x + z <= 4
Bounds
 -inf <= z <= 10
 y <= 5
 x >= 1
Binary
 b
End
)";
  auto m = parse_lp(text);
  ASSERT_EQ(m.num_variables(), 4u);
  EXPECT_EQ(m.num_constraints(), 2u);
  auto x = *m.find_variable("x");
  EXPECT_EQ(m.variables()[x].lower, 1.0);
  EXPECT_EQ(m.variables()[x].objective, -2.0);
  EXPECT_TRUE(std::isinf(m.variables()[*m.find_variable("z")].lower));
  EXPECT_EQ(m.variables()[*m.find_variable("b")].kind, VarKind::binary);
  EXPECT_THROW(parse_lp("Maximize\n obj: x\nGenerals\n x\nEnd\n"), ModelError);
  EXPECT_THROW(parse_lp("Maximize\n obj: x\nSubject To\n c: x <= \nEnd\n"), ModelError);
}

TEST(LpFormat, SolutionFileGrammar) {
  auto m = knapsack();
  bool optimal = false;
  auto x = parse_solution_file(m, "# status optimal\nitem2 1 # chosen\n\nitem1 0\n", &optimal);
  EXPECT_TRUE(optimal);
  EXPECT_EQ(x[1], 1.0);
  EXPECT_THROW(parse_solution_file(m, "nope 1\n"), ModelError);
  auto sol = solve(m);
  auto again = parse_solution_file(m, format_solution_file(m, sol), &optimal);
  EXPECT_EQ(again, sol.values);
}

TEST(LpFormat, ExternalBridgeWithShellSolver) {
  auto dir = std::filesystem::temp_directory_path() / "lngopt_bridge_test";
  auto m = knapsack();
  // A stand-in "solver" that writes a fixed answer.
  auto s = solve_external(m, "printf '# status optimal\\nitem1 0\\nitem2 1\\n' > {sol}", dir.string());
  EXPECT_EQ(s.status, SolveStatus::optimal);
  EXPECT_NEAR(s.objective, 10.0, 1e-12);
  auto bad = solve_external(m, "printf 'item1 1\\nitem2 1\\n' > {sol}", dir.string());
  EXPECT_EQ(bad.status, SolveStatus::infeasible);
  std::filesystem::remove_all(dir);
}
