#include <algorithm>
#include <cmath>
#include <map>

#include "lngopt/milp.hpp"

namespace lngopt {

std::size_t MilpModel::add_variable(const std::string& id, VarKind kind, double lower, double upper,
                                    double objective) {
  if (id.empty()) throw ModelError("variable id must not be empty");
  if (kind == VarKind::binary) {
    lower = 0.0;
    upper = 1.0;
  }
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw ModelError("variable " + id + ": invalid bounds");
  auto [it, inserted] = var_index_.emplace(id, vars_.size());
  if (!inserted) throw ModelError("duplicate variable id '" + id + "'");
  vars_.push_back({id, kind, lower, upper, objective});
  return vars_.size() - 1;
}

std::size_t MilpModel::add_constraint(std::string name, std::vector<LinearTerm> terms, Comparator cmp, double rhs) {
  if (std::isnan(rhs)) throw ModelError("constraint " + name + ": rhs is NaN");
  for (const auto& t : terms)
    if (t.var >= vars_.size())
      throw ModelError("constraint " + name + ": unknown variable index " + std::to_string(t.var));
  std::sort(terms.begin(), terms.end(), [](const LinearTerm& a, const LinearTerm& b) { return a.var < b.var; });
  std::vector<LinearTerm> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) merged.back().coef += t.coef;
    else merged.push_back(t);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(), [](const LinearTerm& t) { return t.coef == 0.0; }),
               merged.end());
  if (name.empty()) {
    name = "c" + std::to_string(rows_.size());
    for (int k = 1; row_index_.count(name); ++k) name = "c" + std::to_string(rows_.size()) + "_" + std::to_string(k);
  }
  if (!row_index_.emplace(name, rows_.size()).second)
    throw ModelError("duplicate constraint name '" + name + "'");
  rows_.push_back({std::move(name), std::move(merged), cmp, rhs});
  return rows_.size() - 1;
}

void MilpModel::set_objective(std::size_t var, double coef) {
  if (var >= vars_.size()) throw ModelError("objective: unknown variable index " + std::to_string(var));
  vars_[var].objective = coef;
}

std::size_t MilpModel::num_binaries() const {
  return static_cast<std::size_t>(
      std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::binary; }));
}

std::optional<std::size_t> MilpModel::find_variable(const std::string& id) const {
  auto it = var_index_.find(id);
  if (it == var_index_.end()) return std::nullopt;
  return it->second;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
  double obj = objective_constant_;
  for (std::size_t j = 0; j < vars_.size(); ++j) obj += vars_[j].objective * x[j];
  return obj;
}

double MilpModel::max_violation(const std::vector<double>& x) const {
  if (x.size() != vars_.size()) return kInfinity;
  double worst = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const auto& v = vars_[j];
    worst = std::max({worst, v.lower - x[j], x[j] - v.upper});
    if (v.kind == VarKind::binary) worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  }
  for (const auto& row : rows_) {
    double act = 0.0;
    for (const auto& t : row.terms) act += t.coef * x[t.var];
    if (row.cmp != Comparator::ge) worst = std::max(worst, act - row.rhs);
    if (row.cmp != Comparator::le) worst = std::max(worst, row.rhs - act);
  }
  return worst;
}

double MilpSolution::value(const MilpModel& model, const std::string& id) const {
  auto j = model.find_variable(id);
  if (!j) throw ModelError("unknown variable id '" + id + "'");
  return values.at(*j);
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::budget_exhausted: return "budget_exhausted";
  }
  return "?";
}

MilpModel build(const ModelSpec& spec) {
  MilpModel model;
  for (const auto& v : spec.variables) model.add_variable(v.id, v.kind, v.lower, v.upper, v.objective);
  for (const auto& row : spec.constraints) {
    std::vector<LinearTerm> terms;
    for (const auto& [id, coef] : row.terms) {
      auto j = model.find_variable(id);
      if (!j) throw ModelError("constraint " + row.name + ": unknown variable '" + id + "'");
      terms.push_back({*j, coef});
    }
    model.add_constraint(row.name, std::move(terms), row.cmp, row.rhs);
  }
  model.set_objective_constant(spec.objective_constant);
  return model;
}

}  // namespace lngopt
