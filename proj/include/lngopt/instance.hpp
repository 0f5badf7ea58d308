// Problem data model for LNG trading and transportation planning.
//
// An Instance is a plain value: once built and checked it is never mutated,
// so one object can be shared by any number of concurrent workers.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace lngopt {

enum class ContractKind { buy, sell };
enum class FuelMode { lng_only, fuel_only, combined };

const char* to_string(ContractKind kind);
const char* to_string(FuelMode mode);
ContractKind contract_kind_from_string(const std::string& text);
FuelMode fuel_mode_from_string(const std::string& text);

/// Raised when an instance violates one of the data-model invariants. The
/// message always names the offending entity.
class InvariantError : public std::runtime_error {
 public:
  InvariantError(std::string entity, const std::string& what)
      : std::runtime_error(entity + ": " + what), entity_(std::move(entity)) {}
  const std::string& entity() const { return entity_; }

 private:
  std::string entity_;
};

struct Port {
  std::string id;
  std::string name;

  bool operator==(const Port&) const = default;
};

/// Symmetric port-to-port distances in nautical miles.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n_ports)
      : n_(n_ports), nm_(n_ports * n_ports, 0.0), known_(n_ports * n_ports, 0) {
    for (std::size_t i = 0; i < n_; ++i) known_[i * n_ + i] = 1;
  }

  std::size_t size() const { return n_; }
  void set(std::size_t a, std::size_t b, double nm) {
    nm_[a * n_ + b] = nm;
    nm_[b * n_ + a] = nm;
    known_[a * n_ + b] = known_[b * n_ + a] = 1;
  }
  double operator()(std::size_t a, std::size_t b) const { return nm_[a * n_ + b]; }
  bool known(std::size_t a, std::size_t b) const { return known_[a * n_ + b] != 0; }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> nm_;
  std::vector<std::uint8_t> known_;
};

struct ConsumptionRow {
  FuelMode fuel_mode = FuelMode::lng_only;
  bool laden = false;
  double speed = 0.0;           // knots
  double consumption = 0.0;     // m3/hour, LNG-equivalent
  double boil_off = 0.0;        // m3/hour
  double fuel_cost_rate = 0.0;  // money/hour for the non-LNG component

  bool operator==(const ConsumptionRow&) const = default;
};

struct Vessel {
  std::string id;
  double capacity = 0.0;  // m3
  double fill_fraction = 0.985;
  double forbidden_low = 0.25;
  double forbidden_high = 0.75;
  std::vector<ConsumptionRow> consumption;
  double idle_boil_off = 0.0;  // m3/day
  int rent_start = 0;
  int rent_end = 0;
  std::size_t initial_port = 0;
  std::size_t final_port = 0;
  double initial_volume = 0.0;

  double fill_capacity() const { return fill_fraction * capacity; }
  double ballast_ceiling() const { return forbidden_low * capacity; }
  double laden_floor() const { return forbidden_high * capacity; }
  bool supports(FuelMode mode) const;
  std::vector<FuelMode> fuel_modes() const;
  /// Rows for (mode, laden) sorted by increasing speed.
  std::vector<ConsumptionRow> rows(FuelMode mode, bool laden) const;
  double max_speed() const;

  bool operator==(const Vessel&) const = default;
};

struct Contract {
  std::string id;
  ContractKind kind = ContractKind::buy;
  std::size_t port = 0;
  int release = 0;   // first servable day
  int deadline = 0;  // last servable day
  double v_min = 0.0;
  double v_max = 0.0;
  // Unit price in money/m3 for each day of the window, release first.
  std::vector<double> unit_prices;

  bool is_buy() const { return kind == ContractKind::buy; }
  bool is_sell() const { return kind == ContractKind::sell; }
  int window_days() const { return deadline - release + 1; }
  bool servable_on(int day) const { return day >= release && day <= deadline; }
  /// Window midpoint, rounded down on odd windows.
  int midpoint() const { return release + (deadline - release) / 2; }
  double price_on(int day) const;

  bool operator==(const Contract&) const = default;
};

/// Free LNG price by (port, day); a step function over days.
class PriceSeries {
 public:
  PriceSeries() = default;
  PriceSeries(std::size_t n_ports, int horizon)
      : horizon_(horizon), price_(n_ports * static_cast<std::size_t>(horizon), 0.0),
        known_(price_.size(), 0) {}

  int horizon() const { return horizon_; }
  void set(std::size_t port, int day, double price) {
    price_[index(port, day)] = price;
    known_[index(port, day)] = 1;
  }
  double operator()(std::size_t port, int day) const { return price_[index(port, day)]; }
  bool known(std::size_t port, int day) const { return known_[index(port, day)] != 0; }

  bool operator==(const PriceSeries&) const = default;

 private:
  std::size_t index(std::size_t port, int day) const {
    return port * static_cast<std::size_t>(horizon_) + static_cast<std::size_t>(day);
  }
  int horizon_ = 0;
  std::vector<double> price_;
  std::vector<std::uint8_t> known_;
};

struct Instance {
  std::string name;
  int horizon_days = 0;
  // Longest allowed gap in days between two consecutive contract services of
  // one vessel; 0 means unlimited.
  int max_trip_days = 0;
  std::vector<Port> ports;
  DistanceMatrix distances;
  std::vector<Vessel> vessels;
  std::vector<Contract> contracts;
  PriceSeries free_prices;

  double distance(std::size_t port_a, std::size_t port_b) const {
    return distances(port_a, port_b);
  }
  double max_capacity() const;
  double max_unit_sell_price() const;
  double max_unit_price() const;
  std::size_t count(ContractKind kind) const;

  std::optional<std::size_t> find_port(const std::string& id) const;
  std::optional<std::size_t> find_contract(const std::string& id) const;
  std::optional<std::size_t> find_vessel(const std::string& id) const;

  bool operator==(const Instance&) const = default;
};

/// A sell contract is small when its minimum volume is below a quarter of the
/// largest vessel capacity in the instance.
bool is_small(const Instance& instance, const Contract& contract);

/// A contract is flexible when it is small or its volume bounds differ.
bool is_flexible(const Instance& instance, const Contract& contract);

/// Throws InvariantError on the first violated invariant.
void check_invariants(const Instance& instance);

}  // namespace lngopt
