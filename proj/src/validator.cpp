#include "lngopt/validator.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lngopt {

const char* to_string(ValidationMode mode) { return mode == ValidationMode::main ? "main" : "node"; }

ValidationMode validation_mode_from_string(const std::string& text) {
  if (text == "main") return ValidationMode::main;
  if (text == "node") return ValidationMode::node;
  throw std::invalid_argument("unknown validation mode '" + text + "'");
}

std::string ViolationReport::summary(std::size_t max_lines) const {
  if (violations.empty()) return "feasible";
  std::ostringstream out;
  out << violations.size() << " violation(s)";
  for (std::size_t i = 0; i < violations.size() && i < max_lines; ++i) {
    const auto& v = violations[i];
    out << "\n  " << v.code << " " << v.ref << " day " << v.day << ": " << v.measured << " vs " << v.bound;
    if (!v.detail.empty()) out << " (" << v.detail << ")";
  }
  return out.str();
}

std::string ViolationReport::to_json() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& v : violations)
    doc.push_back({{"code", v.code}, {"ref", v.ref}, {"day", v.day}, {"measured", v.measured},
                   {"bound", v.bound}, {"detail", v.detail}});
  return nlohmann::json{{"feasible", ok()}, {"violations", doc}}.dump(2) + "\n";
}

namespace {

constexpr double kTol = kVolumeTolerance;

// Table row for (mode, laden, speed) with the LNG and fuel rates per hour.
const ConsumptionRow* find_row(const Vessel& v, FuelMode mode, bool laden, double speed) {
  for (const auto& r : v.consumption)
    if (r.fuel_mode == mode && r.laden == laden && std::abs(r.speed - speed) <= 1e-9) return &r;
  return nullptr;
}

double lng_rate(const ConsumptionRow& r, FuelMode mode) {
  return (mode == FuelMode::fuel_only ? 0.0 : r.consumption) + r.boil_off;
}
double fuel_rate(const ConsumptionRow& r, FuelMode mode) {
  return mode == FuelMode::lng_only ? 0.0 : r.fuel_cost_rate;
}

// Slowest lng-only row covering distance in `days` whole days (node-model speed rule).
const ConsumptionRow* node_row(const Vessel& v, bool laden, double distance, int days) {
  const ConsumptionRow* best = nullptr;
  for (const auto& r : v.consumption) {
    if (r.fuel_mode != FuelMode::lng_only || r.laden != laden) continue;
    if (distance > 0.0) {
      if (days <= 0) continue;
      if (r.speed * 24.0 * days < distance * (1.0 - 1e-12)) continue;
    }
    if (!best || r.speed < best->speed) best = &r;
  }
  return best;
}

bool in_band(double v, const Vessel& vs, double upper) {
  return (v >= -kTol && v <= vs.ballast_ceiling() + kTol) || (v >= vs.laden_floor() - kTol && v <= upper + kTol);
}

class Checker {
 public:
  Checker(const Instance& inst, ValidationMode mode) : inst_(inst), mode_(mode) {}

  ViolationReport run(const Schedule& s) {
    std::map<std::size_t, int> served;
    for (const auto& vs : s.vessels) {
      if (vs.vessel >= inst_.vessels.size()) throw std::out_of_range("schedule references unknown vessel index");
      for (const auto& c : vs.calls) {
        if (c.port >= inst_.ports.size()) throw std::out_of_range("schedule references unknown port index");
        if (c.kind == CallKind::contract) {
          if (c.contract >= inst_.contracts.size())
            throw std::out_of_range("schedule references unknown contract index");
          ++served[c.contract];
        }
      }
    }
    for (const auto& [c, n] : served)
      if (n > 1) add("single_service", inst_.contracts[c].id, 0, n, 1, "contract served more than once");
    std::vector<int> seen(inst_.vessels.size(), 0);
    for (const auto& vs : s.vessels) {
      if (seen[vs.vessel]++) add("structure", inst_.vessels[vs.vessel].id, 0, 2, 1, "vessel listed twice");
      if (!vs.calls.empty()) check_vessel(vs);
    }
    return std::move(report_);
  }

 private:
  void add(std::string code, std::string ref, int day, double measured, double bound, std::string detail = {}) {
    report_.violations.push_back({std::move(code), std::move(ref), day, measured, bound, std::move(detail)});
  }

  void check_vessel(const VesselSchedule& vs) {
    const Vessel& v = inst_.vessels[vs.vessel];
    const std::string& vid = v.id;
    const auto& calls = vs.calls;
    const bool main = mode_ == ValidationMode::main;
    const double cap = main ? v.fill_capacity() : v.capacity;

    if (vs.legs.size() + 1 != calls.size()) {
      add("structure", vid, calls.front().day, static_cast<double>(vs.legs.size()),
          static_cast<double>(calls.size()) - 1, "leg count must be call count minus one");
      return;
    }
    if (main) {
      if (calls.front().kind != CallKind::start) add("location", vid, calls.front().day, 0, 0, "first call must be the start");
      if (calls.back().kind != CallKind::end) add("location", vid, calls.back().day, 0, 0, "last call must be the end");
      for (std::size_t i = 1; i + 1 < calls.size(); ++i)
        if (calls[i].kind != CallKind::contract) add("structure", vid, calls[i].day, 0, 0, "terminal call inside route");
      if (calls.front().kind == CallKind::start) {
        if (calls.front().port != v.initial_port)
          add("location", vid, calls.front().day, static_cast<double>(calls.front().port),
              static_cast<double>(v.initial_port), "start port differs from the initial port");
        if (calls.front().day != v.rent_start)
          add("rent", vid, calls.front().day, calls.front().day, v.rent_start, "start day differs from rent start");
      }
      if (calls.back().kind == CallKind::end) {
        if (calls.back().port != v.final_port)
          add("location", vid, calls.back().day, static_cast<double>(calls.back().port),
              static_cast<double>(v.final_port), "end port differs from the final port");
        if (calls.back().day > v.rent_end)
          add("rent", vid, calls.back().day, calls.back().day, v.rent_end, "arrival after rent end");
      }
    } else {
      for (const auto& c : calls)
        if (c.kind != CallKind::contract) add("structure", vid, c.day, 0, 0, "node routes hold contract calls only");
      if (calls.front().kind == CallKind::contract && !inst_.contracts[calls.front().contract].is_buy())
        add("structure", vid, calls.front().day, 0, 0, "node route must start with a buy");
    }
    if (!vs.onboard.empty() && vs.onboard.size() != calls.size())
      add("structure", vid, calls.front().day, static_cast<double>(vs.onboard.size()),
          static_cast<double>(calls.size()), "onboard trace length");

    double vol = main ? v.initial_volume : vs.start_volume;
    if (!main && !in_band(vol, v, 0.985 * v.capacity))
      add("sloshing", vid, calls.front().day, vol, v.ballast_ceiling(), "starting load inside the forbidden band");

    for (std::size_t i = 0; i < calls.size(); ++i) {
      const PortCall& c = calls[i];
      if (c.volume < -kTol || c.free_purchase < -kTol || c.over_delivery < -kTol)
        add("structure", vid, c.day, std::min({c.volume, c.free_purchase, c.over_delivery}), 0, "negative quantity");
      if (c.kind == CallKind::contract) {
        const Contract& k = inst_.contracts[c.contract];
        if (c.port != k.port) add("structure", k.id, c.day, static_cast<double>(c.port), static_cast<double>(k.port), "port mismatch");
        if (!k.servable_on(c.day)) add("window", k.id, c.day, c.day, c.day < k.release ? k.release : k.deadline);
        if (c.day < v.rent_start || c.day > v.rent_end)
          add("rent", vid, c.day, c.day, c.day < v.rent_start ? v.rent_start : v.rent_end, "service outside rent");
        double lo = k.v_min;
        if (!main && k.is_sell() && k.v_min == 0.0) lo = v.idle_boil_off;
        if (c.volume < lo - kTol) add("volume_bounds", k.id, c.day, c.volume, lo, "below minimum");
        if (c.volume > k.v_max + kTol) add("volume_bounds", k.id, c.day, c.volume, k.v_max, "above maximum");
        if (!main) {
          if (c.day != k.midpoint()) add("window", k.id, c.day, c.day, k.midpoint(), "node visits at the midpoint");
        }
        vol += k.is_buy() ? c.volume : -c.volume;
      } else if (c.volume > kTol) {
        add("structure", vid, c.day, c.volume, 0, "terminal call trades");
      }
      if (!main && (c.free_purchase > kTol || c.over_delivery > kTol))
        add("structure", vid, c.day, c.free_purchase + c.over_delivery, 0, "node routes have no F/W");
      if (c.kind == CallKind::end && (c.free_purchase > kTol || c.over_delivery > kTol))
        add("structure", vid, c.day, c.free_purchase + c.over_delivery, 0, "end call trades");
      vol += c.free_purchase - c.over_delivery;
      if (vol < -kTol) add("negative_volume", vid, c.day, vol, 0, "after call");
      if (vol > cap + kTol) add("capacity", vid, c.day, vol, cap, "after call");
      if (!vs.onboard.empty() && vs.onboard.size() == calls.size() && std::abs(vs.onboard[i] - vol) > kTol)
        add("balance", vid, c.day, vs.onboard[i], vol, "reported onboard volume");
      if (i + 1 == calls.size()) break;

      const PortCall& n = calls[i + 1];
      const Leg& leg = vs.legs[i];
      const double dist = inst_.distance(c.port, n.port);
      double burn = 0.0;
      if (main) {
        const bool laden = vol >= v.laden_floor() - kTol;
        const ConsumptionRow* row = find_row(v, leg.fuel_mode, laden, leg.speed);
        if (!row) {
          add("speed", vid, c.day, leg.speed, 0, std::string("no ") + to_string(leg.fuel_mode) +
                                                      (laden ? " laden" : " ballast") + " row at this speed");
          return;
        }
        const double sail = dist > 0.0 ? dist / leg.speed : 0.0;
        double total = 0.0;
        if (c.kind == CallKind::start) {
          total = 24.0 * (n.day - c.day);
          if (sail > total + 1e-6) add("timing", vid, n.day, sail, total, "start leg too slow");
        } else if (n.kind == CallKind::end) {
          total = 24.0 + sail;
          const int arrival = c.day + 1 + static_cast<int>(std::ceil(sail / 24.0 - 1e-9));
          if (arrival > n.day) add("timing", vid, n.day, arrival, n.day, "end arrival too late");
        } else {
          total = 24.0 * (n.day - c.day);
          if (n.day <= c.day) add("timing", vid, n.day, n.day, c.day + 1, "24 h port operation");
          if (sail > 24.0 * (n.day - c.day - 1) + 1e-6)
            add("timing", vid, n.day, sail, 24.0 * (n.day - c.day - 1), "leg too slow");
        }
        const double idle = std::max(0.0, total - sail);
        burn = sail * lng_rate(*row, leg.fuel_mode) + idle * v.idle_boil_off / 24.0;
        if (sail > 0.0) {
          const double arrive = vol - burn;
          if (!(vol <= v.ballast_ceiling() + kTol || arrive >= v.laden_floor() - kTol))
            add("sloshing", vid, c.day, arrive, v.laden_floor(), "sailing inside the forbidden band");
        }
      } else {
        const bool laden = c.kind == CallKind::contract && inst_.contracts[c.contract].is_buy();
        const int days = n.day - c.day - 1;
        if (days < 0) {
          add("timing", vid, n.day, n.day, c.day + 1, "24 h port operation");
          return;
        }
        if (leg.fuel_mode != FuelMode::lng_only) add("fuel_mode", vid, c.day, 0, 0, "node legs are LNG only");
        const ConsumptionRow* row = node_row(v, laden, dist, days);
        if (!row) {
          add("timing", vid, n.day, dist, 0, "no table speed reaches the next contract");
          return;
        }
        burn = 24.0 * (row->consumption + row->boil_off) * days + v.idle_boil_off;
      }
      if (std::abs(burn - leg.lng_burn) > kTol) add("balance", vid, c.day, leg.lng_burn, burn, "leg LNG burn");
      vol -= burn;
      if (vol < -kTol) add("negative_volume", vid, n.day, vol, 0, "on arrival");
      if (!main && !in_band(vol, v, 0.985 * v.capacity))
        add("sloshing", vid, n.day, vol, v.ballast_ceiling(), "load inside the forbidden band");
    }
    if (!main && !in_band(vol, v, 0.985 * v.capacity))
      add("sloshing", vid, calls.back().day, vol, v.ballast_ceiling(), "final load inside the forbidden band");
  }

  const Instance& inst_;
  ValidationMode mode_;
  ViolationReport report_;
};

}  // namespace

ViolationReport validate(const Schedule& schedule, const Instance& instance, ValidationMode mode) {
  return Checker(instance, mode).run(schedule);
}

ProfitBreakdown evaluate_profit(const Schedule& schedule, const Instance& inst, ValidationMode mode) {
  ProfitBreakdown p;
  for (const auto& vs : schedule.vessels) {
    const Vessel& v = inst.vessels.at(vs.vessel);
    double vol = mode == ValidationMode::main ? v.initial_volume : vs.start_volume;
    for (std::size_t i = 0; i < vs.calls.size(); ++i) {
      const PortCall& c = vs.calls[i];
      if (c.kind == CallKind::contract) {
        const Contract& k = inst.contracts.at(c.contract);
        const double money = k.price_on(c.day) * c.volume;
        if (k.is_buy()) {
          p.purchase_cost += money;
          vol += c.volume;
        } else {
          p.revenue += money;
          vol -= c.volume;
        }
      }
      p.free_lng_cost += c.free_purchase * inst.free_prices(c.port, c.day);
      p.over_delivery_volume += c.over_delivery;
      vol += c.free_purchase - c.over_delivery;
      if (i >= vs.legs.size() || i + 1 >= vs.calls.size()) continue;
      const Leg& leg = vs.legs[i];
      if (mode == ValidationMode::main) {
        const bool laden = vol >= v.laden_floor() - kTol;
        const double dist = inst.distance(c.port, vs.calls[i + 1].port);
        const double sail = dist > 0.0 ? dist / leg.speed : 0.0;
        if (const ConsumptionRow* row = find_row(v, leg.fuel_mode, laden, leg.speed))
          p.fuel_cost += sail * fuel_rate(*row, leg.fuel_mode);
        else
          p.fuel_cost += leg.fuel_cost;
      }
      vol -= leg.lng_burn;
    }
  }
  p.net = p.revenue - p.purchase_cost - p.fuel_cost - p.free_lng_cost;
  return p;
}

}  // namespace lngopt
