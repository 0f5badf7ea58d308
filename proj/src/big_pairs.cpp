#include "lngopt/big_pairs.hpp"

#include <algorithm>
#include <json.hpp>
#include <map>
#include <stdexcept>
#include <tuple>

namespace lngopt {

std::vector<std::size_t> BigPairSolution::buys(const TripSet& trips, std::size_t vessel) const {
  std::vector<std::size_t> out;
  if (vessel >= routes.size()) return out;
  for (std::size_t t : routes[vessel])
    if (trips.trips[t].kind == TripKind::laden) out.push_back(trips.trips[t].start_contract);
  return out;
}

std::vector<std::size_t> BigPairSolution::sells(const TripSet& trips, std::size_t vessel) const {
  std::vector<std::size_t> out;
  if (vessel >= routes.size()) return out;
  for (std::size_t t : routes[vessel])
    if (trips.trips[t].kind == TripKind::laden) out.push_back(trips.trips[t].end_contract);
  return out;
}

bool BigPairSolution::no_over_delivery(const TripSet& trips) const {
  for (std::size_t t : chosen)
    if (trips.trips[t].kind == TripKind::laden && trips.trips[t].over_delivery > 0.0) return false;
  return true;
}

MilpModel build_big_pairs_model(const TripSet& set, const PenaltyParams& params) {
  MilpModel m;
  for (const auto& t : set.trips) m.add_binary("x" + std::to_string(t.id), penalize(t, params));
  for (std::size_t c = 0; c < set.by_contract.size(); ++c) {
    if (set.by_contract[c].empty()) continue;
    std::vector<LinearTerm> terms;
    for (std::size_t t : set.by_contract[c]) terms.push_back({t, 1.0});
    m.add_constraint("once_" + std::to_string(c), std::move(terms), Comparator::le, 1.0);
  }
  for (const auto& s : set.services) {
    std::vector<LinearTerm> terms;
    for (std::size_t t : s.arriving) terms.push_back({t, 1.0});
    for (std::size_t t : s.departing) terms.push_back({t, -1.0});
    m.add_constraint("flow_" + std::to_string(s.vessel) + "_" + std::to_string(s.contract) + "_" + std::to_string(s.day),
                     std::move(terms), Comparator::eq, 0.0);
  }
  for (std::size_t v = 0; v < set.initial.size(); ++v) {
    if (set.initial[v].empty() && set.final[v].empty()) continue;
    std::vector<LinearTerm> chain, cap;
    for (std::size_t t : set.initial[v]) chain.push_back({t, 1.0});
    for (std::size_t t : set.final[v]) {
      chain.push_back({t, -1.0});
      cap.push_back({t, 1.0});
    }
    m.add_constraint("start_" + std::to_string(v), std::move(chain), Comparator::le, 0.0);
    m.add_constraint("end_" + std::to_string(v), std::move(cap), Comparator::le, 1.0);
  }
  return m;
}

BigPairSolution solve_big_pairs(const Instance& inst, const TripSet& set, const PenaltyParams& params,
                                const BigPairOptions& options) {
  MilpModel model = build_big_pairs_model(set, params);
  SolveOptions opt = options.solver;
  if (opt.incumbent.size() != model.num_variables()) opt.incumbent.assign(model.num_variables(), 0.0);
  MilpSolution ms = solve(model, opt);

  BigPairSolution out;
  out.status = ms.status;
  out.gap = ms.gap;
  out.nodes = ms.nodes;
  out.root_basis = ms.root_basis;
  out.routes.assign(inst.vessels.size(), {});
  if (!ms.has_solution()) return out;
  out.has_solution = true;
  out.penalized_objective = ms.objective;
  for (std::size_t t = 0; t < set.trips.size(); ++t)
    if (ms.values[t] > 0.5) {
      out.chosen.push_back(t);
      out.profit += set.trips[t].profit;
    }

  // Follow each vessel's chain from its initial trip.
  std::map<std::tuple<std::size_t, std::size_t, int>, std::size_t> departing;
  std::vector<std::size_t> first(inst.vessels.size(), kNoContract);
  for (std::size_t t : out.chosen) {
    const Trip& tr = set.trips[t];
    if (tr.kind == TripKind::initial) first[tr.vessel] = t;
    if (tr.start_contract != kNoContract) departing[{tr.vessel, tr.start_contract, tr.start_day}] = t;
  }
  for (std::size_t v = 0; v < inst.vessels.size(); ++v) {
    std::size_t t = first[v];
    while (t != kNoContract) {
      out.routes[v].push_back(t);
      const Trip& tr = set.trips[t];
      if (tr.kind == TripKind::final) break;
      auto it = departing.find({v, tr.end_contract, tr.end_day});
      if (it == departing.end()) throw std::logic_error("big-pairs route broken after trip " + std::to_string(t));
      t = it->second;
    }
  }
  std::size_t used = 0;
  for (const auto& r : out.routes) used += r.size();
  if (used != out.chosen.size()) throw std::logic_error("big-pairs solution has trips outside vessel routes");
  return out;
}

Schedule lift_big_pairs(const BigPairSolution& sol, const TripSet& set, const Instance& inst) {
  Schedule s = Schedule::empty(inst, "bigpairs");
  for (std::size_t v = 0; v < inst.vessels.size(); ++v) {
    const auto& route = sol.routes[v];
    if (route.empty()) continue;
    const Vessel& vessel = inst.vessels[v];
    VesselSchedule& vs = s.vessels[v];
    auto leg_of = [](const Trip& t) {
      return Leg{t.speed, t.fuel_mode, t.sail_hours, t.idle_hours, t.lng_burn, t.fuel_cost};
    };

    const Trip& init = set.trips[route.front()];
    PortCall start;
    start.kind = CallKind::start;
    start.port = vessel.initial_port;
    start.day = vessel.rent_start;
    start.free_purchase = init.free_purchase;
    double vol = vessel.initial_volume + start.free_purchase;
    vs.calls.push_back(start);
    vs.onboard.push_back(vol);

    for (std::size_t i = 0; i < route.size(); ++i) {
      const Trip& t = set.trips[route[i]];
      vs.legs.push_back(leg_of(t));
      vol -= t.lng_burn;
      if (t.kind == TripKind::final) {
        PortCall end;
        end.kind = CallKind::end;
        end.port = t.end_port;
        end.day = t.end_day;
        vs.calls.push_back(end);
        vs.onboard.push_back(vol);
        break;
      }
      const Contract& c = inst.contracts[t.end_contract];
      PortCall call;
      call.kind = CallKind::contract;
      call.contract = t.end_contract;
      call.port = c.port;
      call.day = t.end_day;
      if (c.is_buy()) {
        // The next trip is the laden trip planned for an empty tank.
        const Trip& laden = set.trips[route[i + 1]];
        call.volume = std::max(c.v_min, laden.buy_volume - std::max(0.0, vol));
        vol += call.volume;
      } else {
        call.volume = t.traded_volume;
        vol -= call.volume;
        const double target = set.trips[route[i + 1]].lng_burn;
        if (vol > target) call.over_delivery = vol - target;
        else call.free_purchase = target - vol;
        vol = target;
      }
      vs.calls.push_back(call);
      vs.onboard.push_back(vol);
    }
  }
  return s;
}

std::string big_pairs_to_json(const BigPairSolution& sol, const TripSet& set, const Instance& inst) {
  using nlohmann::json;
  json doc;
  doc["status"] = to_string(sol.status);
  doc["penalized_objective"] = sol.penalized_objective;
  doc["profit"] = sol.profit;
  doc["gap"] = sol.gap;
  doc["nodes"] = sol.nodes;
  doc["routes"] = json::array();
  for (std::size_t v = 0; v < sol.routes.size(); ++v) {
    json r;
    r["vessel"] = inst.vessels[v].id;
    r["trips"] = json::array();
    for (std::size_t t : sol.routes[v]) {
      const Trip& tr = set.trips[t];
      auto where = [&](std::size_t c, std::size_t port) {
        return c == kNoContract ? inst.ports[port].id : inst.contracts[c].id;
      };
      r["trips"].push_back({{"id", tr.id},
                            {"kind", to_string(tr.kind)},
                            {"from", where(tr.start_contract, tr.start_port)},
                            {"from_day", tr.start_day},
                            {"to", where(tr.end_contract, tr.end_port)},
                            {"to_day", tr.end_day},
                            {"fuel_mode", to_string(tr.fuel_mode)},
                            {"speed", tr.speed},
                            {"profit", tr.profit},
                            {"over_delivery", tr.over_delivery},
                            {"potential", tr.potential}});
    }
    doc["routes"].push_back(r);
  }
  return doc.dump(2) + "\n";
}

}  // namespace lngopt
