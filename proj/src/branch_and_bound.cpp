// Best-bound branch-and-bound with plunging over the dual simplex.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "lngopt/milp.hpp"
#include "simplex.hpp"

namespace lngopt {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
  std::size_t id = 0;
  double bound = 0.0;
  std::vector<std::pair<int, std::uint8_t>> fixes;  // (column, 0/1)
  std::shared_ptr<const std::vector<std::uint8_t>> basis;
  std::size_t parent = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

lp::Problem to_problem(const MilpModel& model) {
  lp::Problem p;
  const auto& vars = model.variables();
  const auto& rows = model.constraints();
  p.n = static_cast<int>(vars.size());
  p.m = static_cast<int>(rows.size());
  p.cost.resize(p.n);
  p.lower.resize(p.n);
  p.upper.resize(p.n);
  for (int j = 0; j < p.n; ++j) {
    p.cost[j] = -vars[j].objective;
    p.lower[j] = std::isinf(vars[j].lower) ? -lp::kInf : vars[j].lower;
    p.upper[j] = std::isinf(vars[j].upper) ? lp::kInf : vars[j].upper;
  }
  std::vector<int> count(p.n + 1, 0);
  for (const auto& row : rows)
    for (const auto& t : row.terms) ++count[t.var + 1];
  for (int j = 0; j < p.n; ++j) count[j + 1] += count[j];
  p.col_start = count;
  p.row_index.resize(count[p.n]);
  p.value.resize(count[p.n]);
  std::vector<int> fill(count.begin(), count.end() - 1);
  p.row_lower.resize(p.m);
  p.row_upper.resize(p.m);
  for (int i = 0; i < p.m; ++i) {
    const auto& row = rows[i];
    for (const auto& t : row.terms) {
      int pos = fill[t.var]++;
      p.row_index[pos] = i;
      p.value[pos] = t.coef;
    }
    p.row_lower[i] = row.cmp == Comparator::le ? -lp::kInf : row.rhs;
    p.row_upper[i] = row.cmp == Comparator::ge ? lp::kInf : row.rhs;
  }
  return p;
}

std::vector<double> clean_assignment(const MilpModel& model, std::vector<double> x) {
  const auto& vars = model.variables();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    if (vars[j].kind == VarKind::binary) x[j] = std::round(x[j]);
    x[j] = std::clamp(x[j], vars[j].lower, vars[j].upper);
  }
  return x;
}

}  // namespace

MilpSolution solve(const MilpModel& model, const SolveOptions& opt) {
  MilpSolution sol;
  const auto& vars = model.variables();
  const double tol = opt.tolerance;
  const double constant = model.objective_constant();

  // Rows without terms are either trivially satisfied or make the model infeasible.
  for (const auto& row : model.constraints()) {
    if (!row.terms.empty()) continue;
    bool ok = row.cmp == Comparator::le ? 0.0 <= row.rhs + tol
              : row.cmp == Comparator::ge ? 0.0 >= row.rhs - tol
                                           : std::abs(row.rhs) <= tol;
    if (!ok) {
      sol.status = SolveStatus::infeasible;
      sol.gap = kInfinity;
      return sol;
    }
  }

  std::vector<int> binaries;
  for (std::size_t j = 0; j < vars.size(); ++j)
    if (vars[j].kind == VarKind::binary) binaries.push_back(static_cast<int>(j));

  bool have_incumbent = false;
  double incumbent = -kInfinity;
  std::vector<double> best;
  auto offer = [&](std::vector<double> x) {
    x = clean_assignment(model, std::move(x));
    if (model.max_violation(x) > tol) return false;
    double obj = model.objective_value(x);
    if (!have_incumbent || obj > incumbent + 1e-12) {
      have_incumbent = true;
      incumbent = obj;
      best = std::move(x);
      return true;
    }
    return false;
  };
  if (opt.incumbent.size() == vars.size()) offer(opt.incumbent);

  lp::DualSimplex engine(to_problem(model));
  if (!opt.warm_basis.empty()) engine.set_basis(opt.warm_basis);

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::size_t next_id = 1;
  std::optional<Node> current = Node{0, kInfinity, {}, nullptr, 0};
  std::size_t lp_state_node = static_cast<std::size_t>(-1);  // node whose final basis the engine holds
  std::vector<std::pair<int, std::uint8_t>> applied;
  bool budget_hit = false;
  bool gap_hit = false;
  bool root_unbounded = false;
  double lp_iter_base = static_cast<double>(engine.iterations());

  auto open_bound = [&]() {
    double b = -kInfinity;
    if (current) b = std::max(b, current->bound);
    if (!open.empty()) b = std::max(b, open.top().bound);
    return b;
  };

  while (true) {
    if (!current) {
      if (open.empty()) break;
      if (have_incumbent && open.top().bound <= incumbent + tol) {
        while (!open.empty()) open.pop();
        break;
      }
      current = open.top();
      open.pop();
    }
    if (have_incumbent && current->bound <= incumbent + tol) {
      current.reset();
      continue;
    }
    if (sol.nodes >= opt.node_limit || (opt.should_stop && opt.should_stop()) ||
        (opt.lp_iteration_limit > 0 &&
         static_cast<double>(engine.iterations()) - lp_iter_base >= static_cast<double>(opt.lp_iteration_limit))) {
      budget_hit = true;
      break;
    }
    if (have_incumbent && opt.relative_gap > 0.0 &&
        open_bound() - incumbent <= opt.relative_gap * std::max(1.0, std::abs(incumbent))) {
      gap_hit = true;
      break;
    }

    Node node = std::move(*current);
    current.reset();
    ++sol.nodes;

    for (const auto& [j, v] : applied) engine.set_bounds(j, vars[j].lower, vars[j].upper);
    for (const auto& [j, v] : node.fixes) engine.set_bounds(j, v, v);
    applied = node.fixes;
    if (node.id != 0 && lp_state_node != node.parent && node.basis) engine.set_basis(*node.basis);

    lp::Limits limits;
    if (have_incumbent) limits.cutoff = -(incumbent - constant + tol);
    if (opt.lp_iteration_limit > 0) {
      double used = static_cast<double>(engine.iterations()) - lp_iter_base;
      limits.max_iterations = static_cast<std::size_t>(std::max(1.0, static_cast<double>(opt.lp_iteration_limit) - used));
    }
    lp::Status st = engine.solve(limits);
    lp_state_node = node.id;
    if (node.id == 0) sol.root_basis = engine.basis();

    if (st == lp::Status::iteration_limit) {
      budget_hit = true;
      open.push(node);
      break;
    }
    if (st == lp::Status::unbounded) {
      if (node.id == 0) root_unbounded = true;
      if (node.id == 0) break;
      continue;
    }
    if (st != lp::Status::optimal) continue;

    const double node_bound = -engine.objective() + constant;
    if (have_incumbent && node_bound <= incumbent + tol) continue;
    std::vector<double> x = engine.primal();

    int branch = -1;
    double best_frac = 1.0;
    for (int j : binaries) {
      double f = x[j] - std::floor(x[j]);
      if (f <= kIntTol || f >= 1.0 - kIntTol) continue;
      double dist = std::abs(f - 0.5);
      if (dist < best_frac - 1e-12) {
        best_frac = dist;
        branch = j;
      }
    }
    if (branch < 0) {
      offer(x);
      continue;
    }
    // Simple rounding on every node.
    {
      std::vector<double> r = x;
      for (int j : binaries) r[j] = std::round(r[j]);
      offer(std::move(r));
    }

    auto basis = std::make_shared<const std::vector<std::uint8_t>>(engine.basis());
    bool up_first = x[branch] >= 0.5;
    Node child[2];
    for (int dir = 0; dir < 2; ++dir) {
      std::uint8_t val = static_cast<std::uint8_t>(up_first ? 1 - dir : dir);
      child[dir].id = next_id++;
      child[dir].bound = node_bound;
      child[dir].fixes = node.fixes;
      child[dir].fixes.emplace_back(branch, val);
      child[dir].basis = basis;
      child[dir].parent = node.id;
    }
    open.push(std::move(child[1]));
    current = std::move(child[0]);
  }

  sol.lp_iterations = engine.iterations();
  if (root_unbounded) {
    sol.status = SolveStatus::unbounded;
    sol.gap = kInfinity;
    sol.bound = kInfinity;
    return sol;
  }
  if (have_incumbent) {
    sol.values = best;
    sol.objective = incumbent;
  }
  if (budget_hit || gap_hit) {
    double b = std::max(open_bound(), have_incumbent ? incumbent : -kInfinity);
    sol.bound = b;
    sol.gap = have_incumbent ? std::max(0.0, b - incumbent) : kInfinity;
    sol.status = gap_hit ? SolveStatus::feasible : SolveStatus::budget_exhausted;
    if (have_incumbent && sol.gap <= tol) sol.status = SolveStatus::optimal;
    return sol;
  }
  if (!have_incumbent) {
    sol.status = SolveStatus::infeasible;
    sol.gap = kInfinity;
    sol.bound = -kInfinity;
    return sol;
  }
  sol.status = SolveStatus::optimal;
  sol.bound = incumbent;
  sol.gap = 0.0;
  return sol;
}

}  // namespace lngopt
