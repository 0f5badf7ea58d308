// Arc-flow selection of big buy/sell trips over a penalized trip set.
#pragma once

#include <cstdint>
#include <vector>

#include "lngopt/milp.hpp"
#include "lngopt/schedule.hpp"
#include "lngopt/trips.hpp"

namespace lngopt {

struct BigPairSolution {
  SolveStatus status = SolveStatus::infeasible;
  bool has_solution = false;
  std::vector<std::size_t> chosen;               // trip ids, ascending
  std::vector<std::vector<std::size_t>> routes;  // per vessel: initial, laden, ballast, ..., final
  double penalized_objective = 0.0;
  double profit = 0.0;  // sum of P_t over chosen trips
  double gap = 0.0;
  std::size_t nodes = 0;
  std::vector<std::uint8_t> root_basis;

  /// Buy and sell contracts served by vessel k (B_v and S_v).
  std::vector<std::size_t> buys(const TripSet& trips, std::size_t vessel) const;
  std::vector<std::size_t> sells(const TripSet& trips, std::size_t vessel) const;
  /// True when every chosen laden trip has zero over-delivery.
  bool no_over_delivery(const TripSet& trips) const;
};

/// One binary per trip, objective sum of penalized values, constraints
/// "once" per contract, "flow" per (vessel, contract, day) service and the
/// initial/final chain per vessel.
MilpModel build_big_pairs_model(const TripSet& trips, const PenaltyParams& params);

struct BigPairOptions {
  SolveOptions solver;
};

BigPairSolution solve_big_pairs(const Instance& instance, const TripSet& trips, const PenaltyParams& params,
                                const BigPairOptions& options = {});

/// Chosen routes as a main-mode schedule. The volume bought at each buy is
/// reduced by any LNG left onboard, and after each sell the vessel keeps
/// exactly the next leg's burn: surplus is discharged as over-delivery,
/// shortfall is bought at the free price.
Schedule lift_big_pairs(const BigPairSolution& solution, const TripSet& trips, const Instance& instance);

/// Structured dump of the chosen trips and routes.
std::string big_pairs_to_json(const BigPairSolution& solution, const TripSet& trips, const Instance& instance);

}  // namespace lngopt
