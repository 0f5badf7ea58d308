// Solver-free feasibility checks and profit evaluation for schedules.
//
// Shares no arithmetic with the model builders: travel times, speeds, burns
// and volume traces are recomputed here from the instance alone.
#pragma once

#include <string>
#include <vector>

#include "lngopt/instance.hpp"
#include "lngopt/schedule.hpp"

namespace lngopt {

enum class ValidationMode {
  main,  // full problem: start/end calls, any fuel mode, 24 h port days
  node,  // node model: midpoint visits, LNG-only legs at the node-model rates
};

struct Violation {
  std::string code;
  std::string ref;  // vessel or contract id
  int day = 0;
  double measured = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct ViolationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary(std::size_t max_lines = 10) const;
  std::string to_json() const;
};

// Absolute tolerance on volumes (m3); 1e-6 in units of 1e3 m3.
inline constexpr double kVolumeTolerance = 1e-3;

/// Throws std::out_of_range on dangling vessel, contract or port indices.
ViolationReport validate(const Schedule& schedule, const Instance& instance,
                         ValidationMode mode = ValidationMode::main);

/// Recomputes money terms from prices, volumes and the consumption table.
/// Legs are priced with the recorded speed and fuel mode.
ProfitBreakdown evaluate_profit(const Schedule& schedule, const Instance& instance,
                                ValidationMode mode = ValidationMode::main);

const char* to_string(ValidationMode mode);
ValidationMode validation_mode_from_string(const std::string& text);

}  // namespace lngopt
