#include "lngopt/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace lngopt {

const char* to_string(ContractKind kind) { return kind == ContractKind::buy ? "buy" : "sell"; }

const char* to_string(FuelMode mode) {
  switch (mode) {
    case FuelMode::lng_only: return "lng_only";
    case FuelMode::fuel_only: return "fuel_only";
    case FuelMode::combined: return "combined";
  }
  return "?";
}

ContractKind contract_kind_from_string(const std::string& text) {
  if (text == "buy") return ContractKind::buy;
  if (text == "sell") return ContractKind::sell;
  throw std::invalid_argument("unknown contract kind '" + text + "'");
}

FuelMode fuel_mode_from_string(const std::string& text) {
  if (text == "lng_only" || text == "LNG only") return FuelMode::lng_only;
  if (text == "fuel_only" || text == "Fuel only") return FuelMode::fuel_only;
  if (text == "combined" || text == "Combined") return FuelMode::combined;
  throw std::invalid_argument("unknown fuel mode '" + text + "'");
}

bool Vessel::supports(FuelMode mode) const {
  return std::any_of(consumption.begin(), consumption.end(),
                     [mode](const ConsumptionRow& r) { return r.fuel_mode == mode; });
}

std::vector<FuelMode> Vessel::fuel_modes() const {
  std::vector<FuelMode> modes;
  for (FuelMode m : {FuelMode::lng_only, FuelMode::fuel_only, FuelMode::combined})
    if (supports(m)) modes.push_back(m);
  return modes;
}

std::vector<ConsumptionRow> Vessel::rows(FuelMode mode, bool laden) const {
  std::vector<ConsumptionRow> out;
  for (const auto& r : consumption)
    if (r.fuel_mode == mode && r.laden == laden) out.push_back(r);
  std::sort(out.begin(), out.end(),
            [](const ConsumptionRow& a, const ConsumptionRow& b) { return a.speed < b.speed; });
  return out;
}

double Vessel::max_speed() const {
  double best = 0.0;
  for (const auto& r : consumption) best = std::max(best, r.speed);
  return best;
}

double Contract::price_on(int day) const {
  if (unit_prices.empty()) return 0.0;
  int offset = std::clamp(day - release, 0, static_cast<int>(unit_prices.size()) - 1);
  return unit_prices[static_cast<std::size_t>(offset)];
}

double Instance::max_capacity() const {
  double best = 0.0;
  for (const auto& v : vessels) best = std::max(best, v.capacity);
  return best;
}

double Instance::max_unit_sell_price() const {
  double best = 0.0;
  for (const auto& c : contracts)
    if (c.is_sell())
      for (double p : c.unit_prices) best = std::max(best, p);
  return best;
}

double Instance::max_unit_price() const {
  double best = 0.0;
  for (const auto& c : contracts)
    for (double p : c.unit_prices) best = std::max(best, p);
  return best;
}

std::size_t Instance::count(ContractKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      contracts.begin(), contracts.end(), [kind](const Contract& c) { return c.kind == kind; }));
}

namespace {

template <typename T>
std::optional<std::size_t> find_by_id(const std::vector<T>& items, const std::string& id) {
  for (std::size_t i = 0; i < items.size(); ++i)
    if (items[i].id == id) return i;
  return std::nullopt;
}

}  // namespace

std::optional<std::size_t> Instance::find_port(const std::string& id) const {
  return find_by_id(ports, id);
}
std::optional<std::size_t> Instance::find_contract(const std::string& id) const {
  return find_by_id(contracts, id);
}
std::optional<std::size_t> Instance::find_vessel(const std::string& id) const {
  return find_by_id(vessels, id);
}

bool is_small(const Instance& instance, const Contract& contract) {
  return contract.is_sell() && contract.v_min < 0.25 * instance.max_capacity();
}

bool is_flexible(const Instance& instance, const Contract& contract) {
  return is_small(instance, contract) || contract.v_min != contract.v_max;
}

namespace {

void require(bool ok, const std::string& entity, const std::string& what) {
  if (!ok) throw InvariantError(entity, what);
}

template <typename T>
void require_unique_ids(const std::vector<T>& items, const std::string& kind) {
  std::set<std::string> seen;
  for (const auto& item : items) {
    require(!item.id.empty(), kind, "empty identifier");
    require(seen.insert(item.id).second, kind + " " + item.id, "duplicate identifier");
  }
}

}  // namespace

void check_invariants(const Instance& inst) {
  require(inst.horizon_days > 0, "instance", "horizon_days must be positive");
  require(inst.max_trip_days >= 0, "instance", "max_trip_days must be non-negative");
  require(!inst.ports.empty(), "instance", "no ports");
  require_unique_ids(inst.ports, "port");
  require_unique_ids(inst.vessels, "vessel");
  require_unique_ids(inst.contracts, "contract");

  const std::size_t n_ports = inst.ports.size();
  require(inst.distances.size() == n_ports, "distances", "matrix size does not match port count");
  for (std::size_t a = 0; a < n_ports; ++a) {
    for (std::size_t b = 0; b < n_ports; ++b) {
      const std::string ent = "distance " + inst.ports[a].id + "-" + inst.ports[b].id;
      require(inst.distances.known(a, b), ent, "missing entry");
      require(std::isfinite(inst.distances(a, b)) && inst.distances(a, b) >= 0.0, ent,
              "distance must be finite and non-negative");
      require(inst.distances(a, b) == inst.distances(b, a), ent, "matrix not symmetric");
    }
    require(inst.distances(a, a) == 0.0, "distance " + inst.ports[a].id, "self distance not zero");
  }

  require(inst.free_prices.horizon() == inst.horizon_days, "prices",
          "price series horizon differs from instance horizon");
  for (std::size_t p = 0; p < n_ports; ++p)
    for (int d = 0; d < inst.horizon_days; ++d) {
      const std::string ent = "price " + inst.ports[p].id + "@" + std::to_string(d);
      require(inst.free_prices.known(p, d), ent, "missing free price");
      require(inst.free_prices(p, d) >= 0.0, ent, "negative free price");
    }

  for (const auto& v : inst.vessels) {
    const std::string ent = "vessel " + v.id;
    require(v.capacity > 0.0, ent, "capacity must be positive");
    require(0.0 < v.forbidden_low && v.forbidden_low < v.forbidden_high &&
                v.forbidden_high < v.fill_fraction && v.fill_fraction <= 1.0,
            ent, "require 0 < low < high < fill_fraction <= 1");
    require(v.idle_boil_off >= 0.0, ent, "negative idle boil-off");
    require(v.initial_port < n_ports && v.final_port < n_ports, ent, "unknown terminal port");
    require(0 <= v.rent_start && v.rent_start <= v.rent_end && v.rent_end < inst.horizon_days, ent,
            "rent interval outside horizon");
    require(v.initial_volume >= 0.0 && v.initial_volume <= v.fill_capacity(), ent,
            "initial volume outside [0, fill capacity]");
    require(!(v.initial_volume > v.ballast_ceiling() && v.initial_volume < v.laden_floor()), ent,
            "initial volume inside the forbidden zone");
    require(!v.consumption.empty(), ent, "empty consumption table");
    for (const auto& r : v.consumption) {
      require(r.speed > 0.0, ent, "non-positive speed in consumption table");
      require(r.consumption >= 0.0 && r.boil_off >= 0.0 && r.fuel_cost_rate >= 0.0, ent,
              "negative consumption entry");
    }
    for (FuelMode m : v.fuel_modes()) {
      require(!v.rows(m, true).empty() && !v.rows(m, false).empty(), ent,
              std::string("fuel mode ") + to_string(m) + " lacks laden or ballast rows");
    }
  }

  for (const auto& c : inst.contracts) {
    const std::string ent = "contract " + c.id;
    require(c.port < n_ports, ent, "unknown port");
    require(0 <= c.release && c.release <= c.deadline && c.deadline < inst.horizon_days, ent,
            "window must satisfy 0 <= release <= deadline < horizon");
    require(0.0 <= c.v_min && c.v_min <= c.v_max, ent, "volume bounds must satisfy 0 <= v_min <= v_max");
    require(static_cast<int>(c.unit_prices.size()) == c.window_days(), ent,
            "unit price count differs from window length");
    for (double p : c.unit_prices) require(p >= 0.0 && std::isfinite(p), ent, "invalid unit price");
  }
}

}  // namespace lngopt
