// Small-discharge insertion around a big-pairs solution: big contracts stay
// fixed, their volumes become continuous, and small sells may be visited on
// detours inside each big trip.
#pragma once

#include <string>
#include <vector>

#include "lngopt/big_pairs.hpp"
#include "lngopt/milp.hpp"
#include "lngopt/schedule.hpp"
#include "lngopt/trips.hpp"

namespace lngopt {

struct InsertionLeg {
  std::size_t vessel = 0;
  std::size_t from_contract = kNoContract;  // kNoContract = vessel start
  std::size_t to_contract = kNoContract;    // kNoContract = vessel end
  std::size_t from_port = 0, to_port = 0;
  int from_day = 0, to_day = 0;
  double speed = 0.0;
  FuelMode fuel_mode = FuelMode::lng_only;
  double sail_hours = 0.0, idle_hours = 0.0;
  double lng_burn = 0.0, fuel_cost = 0.0;
};

struct NeighborhoodPair {
  std::size_t trip = 0;
  bool laden = false;
  std::size_t start_contract = 0, end_contract = 0;
  int start_day = 0, end_day = 0;
  std::vector<std::size_t> candidates;  // C_t: small sells insertable in this trip
  std::vector<std::size_t> legs;        // L_t: indices into Neighborhood::legs, direct leg first
};

struct VesselNeighborhood {
  std::size_t vessel = 0;
  std::size_t initial_trip = 0, final_trip = 0;
  std::size_t initial_leg = 0, final_leg = 0;
  std::vector<NeighborhoodPair> pairs;
  double final_requirement = 0.0;  // lng_final: burn of the final trip
};

struct Neighborhood {
  std::vector<VesselNeighborhood> vessels;  // used vessels only
  std::vector<InsertionLeg> legs;
  std::vector<std::size_t> pool;            // S: unassigned small sells
  std::vector<std::size_t> big_contracts;   // B

  std::size_t num_candidates() const;
};

/// Small sells not used by the big-pairs solution, visited at their window
/// midpoint (rounded down).
std::vector<std::size_t> small_sell_pool(const BigPairSolution& big, const TripSet& trips, const Instance& instance);

Neighborhood derive_neighborhood(const BigPairSolution& big, const TripSet& trips, const Instance& instance);
/// Same, with an explicit pool of small sells.
Neighborhood derive_neighborhood(const BigPairSolution& big, const TripSet& trips, const Instance& instance,
                                 const std::vector<std::size_t>& pool);

struct InsertionOptions {
  SolveOptions solver;
  double omega = 0.0;  // money per m3 of over-delivery; 0 = 10 x max unit sell price
  // Upper volume bound while laden: fill fraction of capacity (default) or the
  // full capacity.
  bool laden_upper_is_capacity = false;
};

/// Variable naming: V<c>, F<c>, W<c> for big contracts, S<k>_<c> for small
/// sells, L<i> for legs, A<k>_<p>/E<k>_<p> for pair start/end volumes,
/// O<k> for the purchase at the start port and Z<k> for the volume after the
/// last sell. Volumes are in 1e3 m3 and money in 1e6.
MilpModel build_insertion_model(const Neighborhood& nb, const Instance& instance, const InsertionOptions& options);

/// Model point that reproduces the lifted big-pairs schedule.
std::vector<double> lifted_point(const MilpModel& model, const Neighborhood& nb, const BigPairSolution& big,
                                 const TripSet& trips, const Instance& instance);

struct InsertionResult {
  SolveStatus status = SolveStatus::infeasible;
  bool has_solution = false;  // also after an exhausted budget with an incumbent
  Schedule schedule;
  double objective = 0.0;  // model objective in money, includes -omega * W
  double penalty = 0.0;    // omega * W in money
  double omega = 0.0;
  std::size_t nodes = 0;
  std::size_t binaries = 0;
  std::size_t small_served = 0;
  std::vector<std::string> audit_failures;  // empty when all re-checks pass
};

InsertionResult solve_insertion(const Neighborhood& nb, const BigPairSolution& big, const TripSet& trips,
                                const Instance& instance, const InsertionOptions& options = {});

}  // namespace lngopt
