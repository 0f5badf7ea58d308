#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "lngopt/ttopt.hpp"

using namespace lngopt;

namespace {

Grid2D grid16() {
  Grid2D g;
  for (int i = 0; i < 16; ++i) {
    g.o_values.push_back(i);
    g.r_values.push_back(i);
  }
  return g;
}

struct Rank1 {
  std::vector<double> g, h;
  double operator()(double o, double r) const { return g[static_cast<std::size_t>(o)] * h[static_cast<std::size_t>(r)]; }
};

Rank1 random_rank1(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Rank1 f;
  for (int i = 0; i < 16; ++i) {
    f.g.push_back(u(rng));
    f.h.push_back(u(rng));
  }
  return f;
}

std::pair<std::size_t, std::size_t> grid_argmax(const Rank1& f) {
  std::pair<std::size_t, std::size_t> best{0, 0};
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j)
      if (f.g[i] * f.h[j] > f.g[best.first] * f.h[best.second]) best = {i, j};
  return best;
}

double absdet(const Eigen::MatrixXd& a, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd s(rows.size(), a.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) s.row(r) = a.row(rows[r]);
  return std::abs(s.determinant());
}

}  // namespace

TEST(Maxvol, DominantRows) {
  Eigen::MatrixXd a(3, 2);
  a << 1, 0, 0, 1, 0.1, 0.1;
  auto r = maxvol(a);
  std::set<std::size_t> rows(r.rows.begin(), r.rows.end());
  EXPECT_EQ(rows, (std::set<std::size_t>{0, 1}));
  EXPECT_FALSE(r.rank_deficient);
}

TEST(Maxvol, SquareTakesAllRows) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(4, 4);
  auto r = maxvol(a);
  EXPECT_EQ(r.rows, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Maxvol, NoSingleSwapImprovesBeyondThreshold) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd a(6, 2);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 2; ++j) a(i, j) = nd(rng);
    auto r = maxvol(a);
    ASSERT_EQ(r.rows.size(), 2u);
    const double base = absdet(a, r.rows);
    for (std::size_t slot = 0; slot < 2; ++slot)
      for (std::size_t i = 0; i < 6; ++i) {
        if (std::find(r.rows.begin(), r.rows.end(), i) != r.rows.end()) continue;
        auto swapped = r.rows;
        swapped[slot] = i;
        EXPECT_LE(absdet(a, swapped), base * 1.01 + 1e-12);
      }
  }
}

TEST(Maxvol, RankDeficientFallsBack) {
  Eigen::MatrixXd a(4, 2);
  a << 1, 2, 2, 4, 3, 6, 0, 0;
  auto r = maxvol(a);
  EXPECT_TRUE(r.rank_deficient);
  EXPECT_EQ(r.rows.size(), 2u);
  EXPECT_NE(r.rows[0], r.rows[1]);
}

TEST(GridAxes, LogAxisStartsAtZero) {
  auto v = log_axis(100.0, 16);
  ASSERT_EQ(v.size(), 16u);
  EXPECT_EQ(v.front(), 0.0);
  EXPECT_DOUBLE_EQ(v.back(), 100.0);
  EXPECT_NEAR(v[1], 0.1, 1e-12);
  Grid2D g{v, v};
  EXPECT_NO_THROW(g.check());
  EXPECT_EQ(log_axis(0.0, 16), std::vector<double>{0.0});
  Grid2D bad{{0.0, 0.0}, {1.0}};
  EXPECT_THROW(bad.check(), std::invalid_argument);
}

TEST(TtOpt, BudgetOneEvaluatesOrigin) {
  TtOptions o;
  o.budget = 1;
  auto r = optimize([](double a, double b) { return a + b; }, grid16(), o);
  ASSERT_EQ(r.evaluations_used, 1u);
  EXPECT_EQ(r.best_i, 0u);
  EXPECT_EQ(r.best_j, 0u);
}

TEST(TtOpt, ConstantFunction) {
  TtOptions o;
  o.budget = 50;
  auto r = optimize([](double, double) { return 3.5; }, grid16(), o);
  EXPECT_EQ(r.best_value, 3.5);
  EXPECT_EQ(r.evaluations_used, 50u);
}

TEST(TtOpt, Rank1MaximizerWithBudget96) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 5; ++k) {
    Rank1 f = random_rank1(rng);
    TtOptions o;
    o.budget = 96;
    o.seed = static_cast<std::uint64_t>(k);
    auto r = optimize(f, grid16(), o);
    auto best = grid_argmax(f);
    EXPECT_EQ(r.best_i, best.first);
    EXPECT_EQ(r.best_j, best.second);
  }
}

TEST(TtOpt, ContractProperties) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    Rank1 f = random_rank1(rng);
    std::map<std::pair<double, double>, int> calls;
    auto counted = [&](double a, double b) {
      ++calls[{a, b}];
      return f(a, b);
    };
    TtOptions o;
    o.budget = 40;
    o.seed = static_cast<std::uint64_t>(k);
    auto r = optimize(counted, grid16(), o);
    EXPECT_LE(r.evaluations_used, 40u);
    EXPECT_EQ(r.evaluations_used, r.trace.size());
    for (const auto& [p, n] : calls) EXPECT_EQ(n, 1);
    EXPECT_DOUBLE_EQ(f(r.best_o, r.best_r), r.best_value);
    double mx = -1e300;
    for (const auto& t : r.trace) mx = std::max(mx, t.value);
    EXPECT_EQ(mx, r.best_value);
  }
}

TEST(TtOpt, LargerBudgetNeverWorse) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 5; ++k) {
    Rank1 f = random_rank1(rng);
    auto noisy = [&](double a, double b) { return f(a, b) + 0.3 * std::sin(7 * a + 3 * b); };
    double prev = -1e300;
    std::vector<TracePoint> prev_trace;
    for (std::size_t budget : {1, 5, 17, 40, 80, 256}) {
      TtOptions o;
      o.budget = budget;
      o.seed = 9;
      auto r = optimize(noisy, grid16(), o);
      EXPECT_GE(r.best_value, prev);
      // Shorter runs are prefixes of longer ones.
      for (std::size_t i = 0; i < prev_trace.size(); ++i) {
        EXPECT_EQ(prev_trace[i].i, r.trace[i].i);
        EXPECT_EQ(prev_trace[i].j, r.trace[i].j);
      }
      prev = r.best_value;
      prev_trace = r.trace;
    }
    EXPECT_EQ(prev_trace.size(), 256u);
  }
}

TEST(TtOpt, ParallelMatchesSerial) {
  std::mt19937_64 rng(8);
  Rank1 f = random_rank1(rng);
  TtOptions o;
  o.budget = 60;
  auto a = optimize(f, grid16(), o);
  o.workers = 4;
  auto b = optimize(f, grid16(), o);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].i, b.trace[i].i);
    EXPECT_EQ(a.trace[i].j, b.trace[i].j);
  }
}

TEST(TtOpt, ExceptionLeavesPartialTrace) {
  int n = 0;
  auto f = [&](double, double) -> double {
    if (++n == 6) throw std::runtime_error("boom");
    return n;
  };
  TtOptions o;
  o.budget = 30;
  auto r = optimize(f, grid16(), o);
  EXPECT_EQ(r.error, "boom");
  EXPECT_EQ(r.evaluations_used, 5u);
  EXPECT_EQ(r.best_value, 5.0);
}

TEST(TtOpt, TraceCsv) {
  TtOptions o;
  o.budget = 2;
  auto r = optimize([](double a, double b) { return a - b; }, grid16(), o);
  auto csv = trace_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "O,R,value,eval_index");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
