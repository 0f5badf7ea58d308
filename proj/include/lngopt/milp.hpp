// Mixed-integer linear models (maximization), a built-in branch-and-bound
// solver on top of a dual simplex, and LP-file exchange with external solvers.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lngopt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class VarKind { continuous, binary };
enum class Comparator { le, ge, eq };

struct Variable {
  std::string id;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
};

struct LinearTerm {
  std::size_t var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Comparator cmp = Comparator::le;
  double rhs = 0.0;
};

class MilpModel {
 public:
  /// Throws ModelError on a duplicate id or inverted bounds. Binary columns
  /// always get bounds [0, 1].
  std::size_t add_variable(const std::string& id, VarKind kind, double lower, double upper,
                           double objective = 0.0);
  std::size_t add_binary(const std::string& id, double objective = 0.0) {
    return add_variable(id, VarKind::binary, 0.0, 1.0, objective);
  }
  std::size_t add_continuous(const std::string& id, double lower, double upper, double objective = 0.0) {
    return add_variable(id, VarKind::continuous, lower, upper, objective);
  }
  /// Repeated variables in `terms` are merged. Throws ModelError on an
  /// unknown variable index or duplicate non-empty constraint name.
  std::size_t add_constraint(std::string name, std::vector<LinearTerm> terms, Comparator cmp, double rhs);

  void set_objective(std::size_t var, double coef);
  void set_objective_constant(double c) { objective_constant_ = c; }
  double objective_constant() const { return objective_constant_; }

  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Constraint>& constraints() const { return rows_; }
  std::size_t num_variables() const { return vars_.size(); }
  std::size_t num_constraints() const { return rows_.size(); }
  std::size_t num_binaries() const;
  std::optional<std::size_t> find_variable(const std::string& id) const;

  double objective_value(const std::vector<double>& x) const;
  /// Largest violation of bounds, rows and integrality.
  double max_violation(const std::vector<double>& x) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> rows_;
  std::unordered_map<std::string, std::size_t> var_index_;
  std::unordered_map<std::string, std::size_t> row_index_;
  double objective_constant_ = 0.0;
};

/// Declarative description resolved by build().
struct ModelSpec {
  struct Var {
    std::string id;
    VarKind kind = VarKind::continuous;
    double lower = 0.0;
    double upper = kInfinity;
    double objective = 0.0;
  };
  struct Row {
    std::string name;
    std::vector<std::pair<std::string, double>> terms;
    Comparator cmp = Comparator::le;
    double rhs = 0.0;
  };
  std::vector<Var> variables;
  std::vector<Row> constraints;
  double objective_constant = 0.0;
};

/// Throws ModelError on duplicate ids or references to undeclared variables.
MilpModel build(const ModelSpec& spec);

enum class SolveStatus { optimal, feasible, infeasible, unbounded, budget_exhausted };
const char* to_string(SolveStatus status);

struct SolveOptions {
  std::size_t node_limit = 200000;
  std::size_t lp_iteration_limit = 0;  // total over all nodes; 0 = none
  double tolerance = 1e-6;
  // Stop with SolveStatus::feasible once bound - incumbent <= relative_gap * max(1, |incumbent|).
  double relative_gap = 0.0;
  // Optional starting incumbent; used only if it satisfies the model.
  std::vector<double> incumbent;
  // Optional root basis from an earlier solve of a model with the same shape.
  std::vector<std::uint8_t> warm_basis;
  // Polled between nodes; returning true ends the search as budget_exhausted.
  std::function<bool()> should_stop;
};

struct MilpSolution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> values;
  double objective = 0.0;
  double bound = 0.0;  // best upper bound on the optimum
  double gap = 0.0;    // bound - objective (infinity when no solution)
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  std::vector<std::uint8_t> root_basis;

  bool has_solution() const {
    return status == SolveStatus::optimal || status == SolveStatus::feasible ||
           (status == SolveStatus::budget_exhausted && !values.empty());
  }
  double value(const MilpModel& model, const std::string& id) const;
};

MilpSolution solve(const MilpModel& model, const SolveOptions& options = {});

/// CPLEX LP text: Maximize / Subject To / Bounds / Binaries / End.
std::string export_lp(const MilpModel& model);
/// Parses the dialect written by export_lp (and common variants). Minimize
/// objectives are negated. Throws ModelError with a line number.
MilpModel parse_lp(const std::string& text);

/// Parses `var value` lines; '#' starts a comment. Unknown names throw.
std::vector<double> parse_solution_file(const MilpModel& model, const std::string& text, bool* declared_optimal = nullptr);
std::string format_solution_file(const MilpModel& model, const MilpSolution& solution);

/// Writes the model as LP, runs `command` with {lp} and {sol} replaced by
/// file paths inside `work_dir`, then reads the solution back. The returned
/// status is optimal only when the file declares it, feasible when the
/// assignment checks out, infeasible otherwise.
MilpSolution solve_external(const MilpModel& model, const std::string& command, const std::string& work_dir);

}  // namespace lngopt
