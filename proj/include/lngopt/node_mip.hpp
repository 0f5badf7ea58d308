// Node-based MIP: vessel k visits contract i at route position q. Simplified
// physics (LNG-only fuel, midpoint visits, no terminal ports) and a rolling
// half-year decomposition.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lngopt/instance.hpp"
#include "lngopt/milp.hpp"
#include "lngopt/schedule.hpp"
#include "lngopt/trips.hpp"

namespace lngopt {

/// Signed volume bounds: buys in [v_min, v_max], sells in [-v_max, -v_min].
struct SignedBounds {
  double lower = 0.0, upper = 0.0;
};
SignedBounds signed_bounds(const Contract& contract);

struct NodeModelSets {
  std::size_t contracts = 0, vessels = 0;
  std::vector<int> midpoint;
  std::vector<double> idle_rate;  // R_k(0): boil-off per day in port, m3

  int T(std::size_t i, std::size_t j) const { return travel_days_[i * contracts + j]; }
  /// Chosen table speed for i -> j by vessel k; 0 marks an infeasible pair.
  double speed(std::size_t k, std::size_t i, std::size_t j) const { return speed_[pair(k, i, j)]; }
  /// Daily LNG consumption at that speed, m3/day.
  double rate(std::size_t k, std::size_t i, std::size_t j) const { return rate_[pair(k, i, j)]; }
  /// LNG lost between the service of i and arrival at j: R_ijk T_ij + R_k(0).
  double burn(std::size_t k, std::size_t i, std::size_t j) const {
    return rate(k, i, j) * T(i, j) + idle_rate[k];
  }
  bool impossible(std::size_t k, std::size_t i) const { return impossible_[k * contracts + i] != 0; }
  bool first_forbidden(std::size_t k, std::size_t i) const { return first_forbidden_[k * contracts + i] != 0; }
  bool successor_forbidden(std::size_t k, std::size_t i, std::size_t j) const { return successor_[pair(k, i, j)] != 0; }
  bool later_forbidden(std::size_t k, std::size_t i, std::size_t j) const { return later_[pair(k, i, j)] != 0; }
  bool forbidden(std::size_t k, std::size_t i, std::size_t j) const {
    return successor_forbidden(k, i, j) || later_forbidden(k, i, j);
  }
  bool slot(std::size_t i) const { return slot_[i] != 0; }

 private:
  friend NodeModelSets build_node_sets(const Instance& instance);
  std::size_t pair(std::size_t k, std::size_t i, std::size_t j) const { return (k * contracts + i) * contracts + j; }
  std::vector<int> travel_days_;
  std::vector<double> speed_, rate_;
  std::vector<std::uint8_t> impossible_, first_forbidden_, successor_, later_, slot_;
};

/// Also marks a contract impossible for a vessel when its midpoint falls
/// outside the vessel's rent period.
NodeModelSets build_node_sets(const Instance& instance);

/// Longest route any vessel can sail over `included` contracts (all when
/// empty): consecutive visits are at least min(T_ij + 1) days apart.
std::size_t default_node_steps(const NodeModelSets& sets, const std::vector<std::size_t>& included = {});

/// A restricted problem: a subset of contracts, per-vessel starting loads and
/// optionally a fixed first visit (contract and signed volume) whose price is
/// already settled.
struct NodeSubproblem {
  std::vector<std::size_t> contracts;  // empty = all
  std::vector<double> start_load;      // per vessel; empty = all zero
  struct Anchor {
    std::size_t contract = kNoContract;
    double volume = 0.0;
  };
  std::vector<Anchor> anchors;               // per vessel; empty = none
  std::vector<std::vector<std::size_t>> banned;  // per vessel, contracts fixed to 0
};

/// Variables x_i_k_q (binary), V_i_k_q, z_i_j_k_q = x_i_k_q * x_j_k_(q+1),
/// kappa_k_q for q = 0..n_steps and the loads L_k_q, where L_k_n_steps is the
/// load after the last position. Volumes in 1e3 m3, money in 1e6.
MilpModel build_node_model(const Instance& instance, const NodeModelSets& sets, std::size_t n_steps,
                           const NodeSubproblem& sub = {});

struct NodeOptions {
  SolveOptions solver;
  std::size_t n_steps = 0;         // 0 = default_node_steps
  int window_days = 182;           // decomposition window
  std::size_t max_binaries = 60000;  // larger models are not attempted
};

struct NodeStep {
  std::size_t contract = kNoContract;
  double volume = 0.0;  // signed: buys positive, sells negative
};

struct NodeSolution {
  SolveStatus status = SolveStatus::infeasible;
  std::size_t n_steps = 0;
  std::vector<std::vector<NodeStep>> steps;  // [vessel][q]
  std::vector<std::vector<int>> kappa;       // [vessel][q], q = 0..n_steps
  std::vector<std::vector<double>> load;     // [vessel][q], q = 0..n_steps
  double objective = 0.0;                    // money
  double gap = 0.0;
  std::size_t nodes = 0;
  std::size_t binaries = 0;
  std::string note;  // set when the model was not attempted
  Schedule schedule;
};

/// Re-checks the constraints on an extracted solution with its own arithmetic.
/// Returns one message per violation.
std::vector<std::string> audit_node_solution(const NodeSolution& solution, const Instance& instance,
                                             const NodeModelSets& sets, const NodeSubproblem& sub = {},
                                             double tol = 1e-6);

NodeSolution solve_node(const Instance& instance, const NodeModelSets& sets, const NodeSubproblem& sub,
                        const NodeOptions& options);
NodeSolution solve_full(const Instance& instance, const NodeOptions& options = {});

struct DecomposedResult {
  Schedule schedule;
  double objective = 0.0;  // node-mode profit of the concatenated schedule
  std::vector<SolveStatus> window_status;
  std::vector<std::string> notes;
  std::size_t windows = 0;
};

/// Sequential windows of options.window_days. After each window a vessel's
/// route is cut after its last buy, which becomes the fixed first visit of the
/// next window; later services are released back to the pool.
DecomposedResult solve_decomposed(const Instance& instance, const NodeOptions& options = {});

}  // namespace lngopt
