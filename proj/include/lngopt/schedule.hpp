// Executable plan: per-vessel timed port calls, legs and volume trace.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lngopt/instance.hpp"

namespace lngopt {

enum class CallKind { start, contract, end };

struct PortCall {
  CallKind kind = CallKind::contract;
  std::size_t contract = static_cast<std::size_t>(-1);
  std::size_t port = 0;
  // Service day for contracts, rent start for the start call, arrival day for
  // the end call.
  int day = 0;
  double volume = 0.0;         // traded volume, always >= 0
  double free_purchase = 0.0;  // LNG bought at the free price (F)
  double over_delivery = 0.0;  // LNG discharged without payment (W)
};

// Leg between calls[i] and calls[i + 1].
struct Leg {
  double speed = 0.0;
  FuelMode fuel_mode = FuelMode::lng_only;
  double sail_hours = 0.0;
  double idle_hours = 0.0;
  double lng_burn = 0.0;
  double fuel_cost = 0.0;
};

struct VesselSchedule {
  std::size_t vessel = 0;
  // Onboard volume before the first call. Main-mode schedules start at the
  // vessel's initial volume; node-mode routes start from this value.
  double start_volume = 0.0;
  std::vector<PortCall> calls;
  std::vector<Leg> legs;        // calls.size() - 1 entries (or none)
  std::vector<double> onboard;  // volume right after each call
};

struct ProfitBreakdown {
  double revenue = 0.0;
  double purchase_cost = 0.0;
  double fuel_cost = 0.0;
  double free_lng_cost = 0.0;
  double over_delivery_volume = 0.0;
  double net = 0.0;
};

struct Schedule {
  std::string source;  // producing model, e.g. "bigpairs", "insertion", "node_mip"
  std::vector<VesselSchedule> vessels;  // one entry per vessel in instance order
  double penalty = 0.0;                 // model-side over-delivery penalty (omega * W), not money

  /// Empty plan for every vessel of the instance.
  static Schedule empty(const Instance& instance, std::string source);
  std::size_t num_calls() const;
};

std::string schedule_to_json(const Schedule& schedule, const Instance& instance);
/// Throws ParseError on malformed documents or unknown ids.
Schedule schedule_from_json(const std::string& text, const Instance& instance);

/// Per-day rows (vessel, day, port or "at_sea", onboard volume) for plotting.
std::string schedule_daily_csv(const Schedule& schedule, const Instance& instance);

}  // namespace lngopt
