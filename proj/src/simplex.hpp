// Bounded dual simplex over sparse columns.
//
// Problem: minimize c'x subject to row_lower <= A x <= row_upper and
// lower <= x <= upper. Internally each row i gets a logical s_i with
// A x + s = 0, so the all-logical basis is the identity. Every column is
// boxed (row boxes are tightened by the activity range, infinite variable
// bounds are replaced by a large artificial box), which makes any basis
// dual feasible after flipping nonbasic columns to the proper bound. That
// is what lets the branch-and-bound warm start from arbitrary bases.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace lngopt::lp {

inline constexpr double kInf = 1e30;
inline constexpr double kArtificialBound = 1e7;

struct Problem {
  int n = 0;  // structural columns
  int m = 0;  // rows
  std::vector<int> col_start;  // CSC, size n+1
  std::vector<int> row_index;
  std::vector<double> value;
  std::vector<double> cost;
  std::vector<double> lower, upper;
  std::vector<double> row_lower, row_upper;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit, cutoff };

enum : std::uint8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2 };

struct Limits {
  std::size_t max_iterations = 1000000;
  // Stop with Status::cutoff once the (minimization) objective provably
  // exceeds this value.
  double cutoff = kInf;
};

class DualSimplex {
 public:
  explicit DualSimplex(const Problem& problem);

  /// Changes the bounds of a structural column; keeps the basis.
  void set_bounds(int j, double lower, double upper);
  double lower(int j) const { return lb_[j]; }
  double upper(int j) const { return ub_[j]; }
  void set_costs(const std::vector<double>& cost);

  Status solve(const Limits& limits = {});

  /// Objective c'x of the current point (valid after Status::optimal).
  double objective() const;
  /// Structural values.
  std::vector<double> primal() const;
  std::size_t iterations() const { return total_iterations_; }
  bool hit_artificial_bound() const;

  /// Column statuses (n + m entries).
  std::vector<std::uint8_t> basis() const { return status_; }
  /// Installs a basis; falls back to the logical basis on a shape mismatch.
  void set_basis(const std::vector<std::uint8_t>& status);
  /// True when the problem was detected infeasible from row activity ranges.
  bool trivially_infeasible() const { return trivially_infeasible_; }

 private:
  void reset_to_logical_basis();
  void refactor();
  void compute_primal();
  void compute_duals();
  bool fix_dual_infeasibilities();
  void ftran(std::vector<double>& v) const;
  void btran(std::vector<double>& v) const;
  void add_eta(const std::vector<double>& column, int pivot_row);
  void column(int j, std::vector<double>& out) const;  // dense scatter of column j
  void perturb_costs();
  void remove_perturbation();
  double dual_objective_bound() const;
  double working_cost(int j) const { return cost_[j] + pert_[j]; }

  int n_ = 0, m_ = 0, N_ = 0;
  std::vector<int> col_start_, row_index_;
  std::vector<double> value_;
  std::vector<int> row_start_, col_index_;  // CSR of structural part
  std::vector<double> row_value_;

  std::vector<double> cost_, pert_;
  std::vector<double> lb_, ub_;
  std::vector<double> x_, d_;
  std::vector<std::uint8_t> status_;
  std::vector<int> head_;  // basic column at each row position
  std::vector<double> dse_;
  bool perturbed_ = false;
  bool primal_dirty_ = true;
  bool factor_dirty_ = true;
  bool trivially_infeasible_ = false;

  // Product-form inverse: B^-1 = E_k ... E_1.
  std::vector<int> eta_row_, eta_start_, eta_index_;
  std::vector<double> eta_pivot_, eta_value_;
  int updates_since_refactor_ = 0;

  std::size_t total_iterations_ = 0;
};

}  // namespace lngopt::lp
