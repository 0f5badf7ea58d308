// Trip enumeration for the arc-flow model: initial, laden, ballast and final
// trips with profit, over-delivery and small-sell potential.
#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lngopt/instance.hpp"

namespace lngopt {

inline constexpr std::size_t kNoContract = static_cast<std::size_t>(-1);

enum class TripKind { initial, laden, ballast, final };
const char* to_string(TripKind kind);

struct Trip {
  std::size_t id = 0;
  TripKind kind = TripKind::laden;
  std::size_t vessel = 0;
  std::size_t start_contract = kNoContract;  // none for initial trips
  std::size_t start_port = 0;
  int start_day = 0;
  std::size_t end_contract = kNoContract;  // none for final trips
  std::size_t end_port = 0;
  int end_day = 0;  // arrival day for final trips
  double speed = 0.0;
  FuelMode fuel_mode = FuelMode::lng_only;
  bool laden = false;  // which consumption rows apply
  double sail_hours = 0.0;
  double idle_hours = 0.0;
  double lng_burn = 0.0;   // m3
  double fuel_cost = 0.0;  // money
  double buy_volume = 0.0;     // laden: volume loaded at the buy
  double traded_volume = 0.0;  // laden: planned sell volume
  double free_purchase = 0.0;  // LNG bought at the free price to cover the burn
  double profit = 0.0;         // P_t
  double over_delivery = 0.0;  // w_t
  int potential = 0;           // y_t
};

struct PenaltyParams {
  double over_delivery_penalty = 0.0;  // O, money per m3
  double potential_reward = 0.0;       // R, money per counted small sell
};

struct LegBurn {
  double lng_used = 0.0;
  double fuel_cost = 0.0;
};

/// Node-model moving time between two contracts, in days (negative = infeasible).
int travel_time(const Contract& from, const Contract& to);

/// Smallest table speed covering `distance` nm in `time_days`; nullopt when
/// the required speed exceeds the fastest row. Zero distance yields the
/// slowest row even for zero time.
std::optional<double> select_speed(const Vessel& vessel, FuelMode mode, bool laden, double distance,
                                   double time_days);

/// Throws std::invalid_argument when no row matches (mode, laden, speed).
LegBurn leg_burn(const Vessel& vessel, FuelMode mode, bool laden, double speed, double sail_hours,
                 double idle_hours);

struct TripSet {
  std::vector<Trip> trips;
  // Laden trips touching each contract (C_c).
  std::vector<std::vector<std::size_t>> by_contract;
  // Keyed by (vessel, contract, day): trips arriving at / departing from that service.
  struct Service {
    std::size_t vessel = 0;
    std::size_t contract = 0;
    int day = 0;
    std::vector<std::size_t> arriving;
    std::vector<std::size_t> departing;
  };
  std::vector<Service> services;
  std::vector<std::vector<std::size_t>> initial;  // per vessel
  std::vector<std::vector<std::size_t>> final;    // per vessel

  std::size_t count(TripKind kind) const;
  double max_abs_profit() const;
  int max_potential() const;
};

TripSet generate_trips(const Instance& instance);

/// Value of a laden or ballast trip before penalties.
double trip_profit(const Trip& trip, const Instance& instance);
double over_delivery(const Trip& trip, const Instance& instance);
int multi_destination_potential(const Trip& trip, const Instance& instance);
double penalize(const Trip& trip, const PenaltyParams& params);

void write_trips_csv(std::ostream& out, const Instance& instance, const TripSet& trips);

}  // namespace lngopt
