#include "lngopt/insertion.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "lngopt/validator.hpp"

namespace lngopt {

namespace {

// Model units: volumes in 1e3 m3, money in 1e6.
constexpr double kVol = 1e-3;
constexpr double kMoney = 1e-6;
constexpr double kPrice = kMoney / kVol;  // money/m3 -> 1e6 per 1e3 m3

std::string sid(std::size_t a) { return std::to_string(a); }

}  // namespace

std::size_t Neighborhood::num_candidates() const {
  std::size_t n = 0;
  for (const auto& v : vessels)
    for (const auto& p : v.pairs) n += p.candidates.size();
  return n;
}

std::vector<std::size_t> small_sell_pool(const BigPairSolution& big, const TripSet& trips, const Instance& inst) {
  std::set<std::size_t> used;
  for (std::size_t t : big.chosen) {
    const Trip& tr = trips.trips[t];
    if (tr.start_contract != kNoContract) used.insert(tr.start_contract);
    if (tr.end_contract != kNoContract) used.insert(tr.end_contract);
  }
  std::vector<std::size_t> pool;
  for (std::size_t c = 0; c < inst.contracts.size(); ++c)
    if (inst.contracts[c].is_sell() && !used.count(c) && is_small(inst, inst.contracts[c])) pool.push_back(c);
  return pool;
}

Neighborhood derive_neighborhood(const BigPairSolution& big, const TripSet& trips, const Instance& inst) {
  return derive_neighborhood(big, trips, inst, small_sell_pool(big, trips, inst));
}

Neighborhood derive_neighborhood(const BigPairSolution& big, const TripSet& trips, const Instance& inst,
                                 const std::vector<std::size_t>& pool_in) {
  Neighborhood nb;
  nb.pool = pool_in;
  std::sort(nb.pool.begin(), nb.pool.end());
  nb.pool.erase(std::unique(nb.pool.begin(), nb.pool.end()), nb.pool.end());

  auto copy_leg = [&](const Trip& t) {
    InsertionLeg l;
    l.vessel = t.vessel;
    l.from_contract = t.start_contract;
    l.to_contract = t.end_contract;
    l.from_port = t.start_port;
    l.to_port = t.end_port;
    l.from_day = t.start_day;
    l.to_day = t.end_day;
    l.speed = t.speed;
    l.fuel_mode = t.fuel_mode;
    l.sail_hours = t.sail_hours;
    l.idle_hours = t.idle_hours;
    l.lng_burn = t.lng_burn;
    l.fuel_cost = t.fuel_cost;
    nb.legs.push_back(l);
    return nb.legs.size() - 1;
  };

  for (std::size_t k = 0; k < big.routes.size(); ++k) {
    const auto& route = big.routes[k];
    if (route.empty()) continue;
    const Vessel& v = inst.vessels[k];
    VesselNeighborhood vn;
    vn.vessel = k;
    vn.initial_trip = route.front();
    vn.final_trip = route.back();
    vn.initial_leg = copy_leg(trips.trips[route.front()]);
    for (std::size_t i = 1; i + 1 < route.size(); ++i) {
      const Trip& t = trips.trips[route[i]];
      NeighborhoodPair p;
      p.trip = t.id;
      p.laden = t.kind == TripKind::laden;
      p.start_contract = t.start_contract;
      p.end_contract = t.end_contract;
      p.start_day = t.start_day;
      p.end_day = t.end_day;
      p.legs.push_back(copy_leg(t));
      nb.big_contracts.push_back(t.start_contract);

      const auto rows = v.rows(t.fuel_mode, p.laden);
      const double top = rows.empty() ? 0.0 : rows.back().speed;
      const double volume_room = p.laden ? v.fill_capacity() - v.laden_floor() : v.ballast_ceiling();
      for (std::size_t c : nb.pool) {
        const Contract& s = inst.contracts[c];
        const int m = s.midpoint();
        if (m <= t.start_day || m >= t.end_day || top <= 0.0) continue;
        if (s.v_min > volume_room) continue;
        if (inst.distance(t.start_port, s.port) / (24.0 * top) > (m - t.start_day - 1) + 1e-12) continue;
        if (inst.distance(s.port, t.end_port) / (24.0 * top) > (t.end_day - m - 1) + 1e-12) continue;
        p.candidates.push_back(c);
      }

      auto make_leg = [&](std::size_t from_c, std::size_t from_port, int from_day, std::size_t to_c,
                          std::size_t to_port, int to_day) {
        const double dist = inst.distance(from_port, to_port);
        auto speed = select_speed(v, t.fuel_mode, p.laden, dist, to_day - from_day - 1);
        if (!speed) return;
        InsertionLeg l;
        l.vessel = k;
        l.from_contract = from_c;
        l.to_contract = to_c;
        l.from_port = from_port;
        l.to_port = to_port;
        l.from_day = from_day;
        l.to_day = to_day;
        l.speed = *speed;
        l.fuel_mode = t.fuel_mode;
        l.sail_hours = dist > 0.0 ? dist / *speed : 0.0;
        l.idle_hours = std::max(0.0, 24.0 * (to_day - from_day) - l.sail_hours);
        auto burn = leg_burn(v, t.fuel_mode, p.laden, *speed, l.sail_hours, l.idle_hours);
        l.lng_burn = burn.lng_used;
        l.fuel_cost = burn.fuel_cost;
        nb.legs.push_back(l);
        p.legs.push_back(nb.legs.size() - 1);
      };
      for (std::size_t c : p.candidates) {
        const Contract& s = inst.contracts[c];
        make_leg(t.start_contract, t.start_port, t.start_day, c, s.port, s.midpoint());
      }
      for (std::size_t a : p.candidates)
        for (std::size_t b : p.candidates) {
          const Contract& sa = inst.contracts[a];
          const Contract& sb = inst.contracts[b];
          if (sb.midpoint() <= sa.midpoint()) continue;
          make_leg(a, sa.port, sa.midpoint(), b, sb.port, sb.midpoint());
        }
      for (std::size_t c : p.candidates) {
        const Contract& s = inst.contracts[c];
        make_leg(c, s.port, s.midpoint(), t.end_contract, t.end_port, t.end_day);
      }
      vn.pairs.push_back(std::move(p));
    }
    if (!vn.pairs.empty()) nb.big_contracts.push_back(vn.pairs.back().end_contract);
    vn.final_leg = copy_leg(trips.trips[route.back()]);
    vn.final_requirement = trips.trips[route.back()].lng_burn;
    nb.vessels.push_back(std::move(vn));
  }
  return nb;
}

namespace {

double omega_of(const Instance& inst, const InsertionOptions& o) {
  return o.omega > 0.0 ? o.omega : 10.0 * inst.max_unit_sell_price();
}

}  // namespace

MilpModel build_insertion_model(const Neighborhood& nb, const Instance& inst, const InsertionOptions& opt) {
  MilpModel m;
  const double omega = omega_of(inst, opt);

  // Legs first so that L<i> has index i.
  for (std::size_t i = 0; i < nb.legs.size(); ++i) m.add_binary("L" + sid(i), -nb.legs[i].fuel_cost * kMoney);

  auto var = [&](const std::string& id) { return *m.find_variable(id); };
  std::vector<std::vector<LinearTerm>> out_small(inst.contracts.size()), in_small(inst.contracts.size());

  for (const auto& vn : nb.vessels) {
    const std::size_t k = vn.vessel;
    const Vessel& v = inst.vessels[k];
    const double C = v.capacity * kVol;
    const double U = (opt.laden_upper_is_capacity ? v.capacity : v.fill_capacity()) * kVol;
    const double low = v.ballast_ceiling() * kVol;
    const double high = v.laden_floor() * kVol;
    (void)C;
    const InsertionLeg& init = nb.legs[vn.initial_leg];
    const double v0 = v.initial_volume * kVol;
    const double init_burn = init.lng_burn * kVol;
    const bool start_laden = v.initial_volume >= v.laden_floor();
    const double o_lo = std::max(0.0, init_burn - v0);
    const double o_hi = start_laden ? o_lo : std::max(o_lo, low - v0);
    m.add_continuous("O" + sid(k), o_lo, o_hi, -inst.free_prices(init.from_port, init.from_day) * kPrice);

    // Big contract volumes.
    auto add_big = [&](std::size_t c, int day) {
      const Contract& ct = inst.contracts[c];
      const double u = ct.price_on(day) * kPrice;
      m.add_continuous("V" + sid(c), ct.v_min * kVol, ct.v_max * kVol, ct.is_buy() ? -u : u);
      m.add_continuous("F" + sid(c), 0.0, U, -inst.free_prices(ct.port, day) * kPrice);
      if (ct.is_sell()) m.add_continuous("W" + sid(c), 0.0, U, -omega * kPrice);
    };
    for (const auto& p : vn.pairs) add_big(p.start_contract, p.start_day);
    if (!vn.pairs.empty()) add_big(vn.pairs.back().end_contract, vn.pairs.back().end_day);

    for (std::size_t pi = 0; pi < vn.pairs.size(); ++pi) {
      const auto& p = vn.pairs[pi];
      const double lo = p.laden ? high : 0.0;
      const double hi = p.laden ? U : low;
      m.add_continuous("A" + sid(k) + "_" + sid(pi), lo, hi);
      m.add_continuous("E" + sid(k) + "_" + sid(pi), lo, hi);
      for (std::size_t c : p.candidates) {
        const Contract& s = inst.contracts[c];
        m.add_continuous("S" + sid(k) + "_" + sid(c), 0.0, s.v_max * kVol, s.price_on(s.midpoint()) * kPrice);
      }
    }
    m.add_continuous("Z" + sid(k), vn.final_requirement * kVol, low);

    // Volume consistency.
    for (std::size_t pi = 0; pi < vn.pairs.size(); ++pi) {
      const auto& p = vn.pairs[pi];
      const std::size_t c = p.start_contract;
      const std::size_t A = var("A" + sid(k) + "_" + sid(pi)), E = var("E" + sid(k) + "_" + sid(pi));
      std::vector<LinearTerm> row{{A, 1.0}, {var("F" + sid(c)), -1.0}};
      double rhs = 0.0;
      if (pi == 0) {
        row.push_back({var("O" + sid(k)), -1.0});
        rhs = v0 - init_burn;
      } else {
        row.push_back({var("E" + sid(k) + "_" + sid(pi - 1)), -1.0});
      }
      if (p.laden) {
        row.push_back({var("V" + sid(c)), -1.0});
      } else {
        row.push_back({var("V" + sid(c)), 1.0});
        row.push_back({var("W" + sid(c)), 1.0});
      }
      m.add_constraint("start" + sid(k) + "_" + sid(pi), std::move(row), Comparator::eq, rhs);

      std::vector<LinearTerm> tel{{E, 1.0}, {A, -1.0}};
      for (std::size_t s : p.candidates) tel.push_back({var("S" + sid(k) + "_" + sid(s)), 1.0});
      for (std::size_t l : p.legs) tel.push_back({l, nb.legs[l].lng_burn * kVol});
      m.add_constraint("end" + sid(k) + "_" + sid(pi), std::move(tel), Comparator::eq, 0.0);
      m.add_constraint("order" + sid(k) + "_" + sid(pi), {{E, 1.0}, {A, -1.0}}, Comparator::le, 0.0);
    }
    if (!vn.pairs.empty()) {
      const std::size_t last = vn.pairs.size() - 1;
      const std::size_t c = vn.pairs[last].end_contract;
      m.add_constraint("final" + sid(k),
                       {{var("Z" + sid(k)), 1.0},
                        {var("E" + sid(k) + "_" + sid(last)), -1.0},
                        {var("V" + sid(c)), 1.0},
                        {var("W" + sid(c)), 1.0},
                        {var("F" + sid(c)), -1.0}},
                       Comparator::eq, 0.0);
    }

    // Leg flow at big contracts: exactly one leg in and one out.
    std::vector<LinearTerm> in_b0{{vn.initial_leg, 1.0}};
    for (std::size_t pi = 0; pi < vn.pairs.size(); ++pi) {
      const auto& p = vn.pairs[pi];
      std::vector<LinearTerm> out, in_end;
      for (std::size_t l : p.legs) {
        if (nb.legs[l].from_contract == p.start_contract) out.push_back({l, 1.0});
        if (nb.legs[l].to_contract == p.end_contract) in_end.push_back({l, 1.0});
        if (nb.legs[l].to_contract != p.end_contract) in_small[nb.legs[l].to_contract].push_back({l, 1.0});
        if (nb.legs[l].from_contract != p.start_contract) out_small[nb.legs[l].from_contract].push_back({l, 1.0});
      }
      m.add_constraint("out" + sid(k) + "_" + sid(pi), std::move(out), Comparator::eq, 1.0);
      if (pi == 0) m.add_constraint("in" + sid(k) + "_first", in_b0, Comparator::eq, 1.0);
      m.add_constraint("in" + sid(k) + "_" + sid(pi), std::move(in_end), Comparator::eq, 1.0);
    }
    m.add_constraint("out" + sid(k) + "_last", {{vn.final_leg, 1.0}}, Comparator::eq, 1.0);

    // Small sells: enter iff leave, volume only when visited.
    for (const auto& p : vn.pairs) {
      for (std::size_t c : p.candidates) {
        std::vector<LinearTerm> bal, lo, hi;
        const std::size_t S = var("S" + sid(k) + "_" + sid(c));
        const Contract& s = inst.contracts[c];
        lo.push_back({S, 1.0});
        hi.push_back({S, 1.0});
        for (std::size_t l : p.legs) {
          if (nb.legs[l].to_contract == c) bal.push_back({l, 1.0});
          if (nb.legs[l].from_contract == c) {
            bal.push_back({l, -1.0});
            lo.push_back({l, -s.v_min * kVol});
            hi.push_back({l, -s.v_max * kVol});
          }
        }
        m.add_constraint("visit" + sid(k) + "_" + sid(c), std::move(bal), Comparator::eq, 0.0);
        m.add_constraint("smin" + sid(k) + "_" + sid(c), std::move(lo), Comparator::ge, 0.0);
        m.add_constraint("smax" + sid(k) + "_" + sid(c), std::move(hi), Comparator::le, 0.0);
      }
    }
  }
  // Each small sell at most once over all vessels.
  for (std::size_t c : nb.pool) {
    if (out_small[c].size() > 1) m.add_constraint("once_out" + sid(c), out_small[c], Comparator::le, 1.0);
    if (in_small[c].size() > 1) m.add_constraint("once_in" + sid(c), in_small[c], Comparator::le, 1.0);
  }
  return m;
}

std::vector<double> lifted_point(const MilpModel& m, const Neighborhood& nb, const BigPairSolution& big,
                                 const TripSet& trips, const Instance& inst) {
  std::vector<double> x(m.num_variables(), 0.0);
  auto set = [&](const std::string& id, double v) {
    auto j = m.find_variable(id);
    if (!j) throw std::logic_error("lifted point: no variable " + id);
    x[*j] = v;
  };
  Schedule lifted = lift_big_pairs(big, trips, inst);
  for (const auto& vn : nb.vessels) {
    const std::size_t k = vn.vessel;
    const VesselSchedule& vs = lifted.vessels[k];
    x[vn.initial_leg] = 1.0;
    x[vn.final_leg] = 1.0;
    set("O" + sid(k), vs.calls.front().free_purchase * kVol);
    // calls: start, b0, s0, b1, ..., s_last, end
    for (std::size_t ci = 1; ci + 1 < vs.calls.size(); ++ci) {
      const PortCall& c = vs.calls[ci];
      set("V" + sid(c.contract), c.volume * kVol);
      set("F" + sid(c.contract), c.free_purchase * kVol);
      if (inst.contracts[c.contract].is_sell()) set("W" + sid(c.contract), c.over_delivery * kVol);
    }
    for (std::size_t pi = 0; pi < vn.pairs.size(); ++pi) {
      const auto& p = vn.pairs[pi];
      x[p.legs.front()] = 1.0;
      const double a = vs.onboard[pi + 1];
      set("A" + sid(k) + "_" + sid(pi), a * kVol);
      set("E" + sid(k) + "_" + sid(pi), (a - nb.legs[p.legs.front()].lng_burn) * kVol);
    }
    set("Z" + sid(k), vs.onboard[vs.onboard.size() - 2] * kVol);
  }
  return x;
}

InsertionResult solve_insertion(const Neighborhood& nb, const BigPairSolution& big, const TripSet& trips,
                                const Instance& inst, const InsertionOptions& opt) {
  InsertionResult res;
  res.omega = omega_of(inst, opt);
  MilpModel m = build_insertion_model(nb, inst, opt);
  res.binaries = m.num_binaries();
  SolveOptions so = opt.solver;
  if (so.incumbent.empty()) so.incumbent = lifted_point(m, nb, big, trips, inst);
  MilpSolution sol = solve(m, so);
  res.status = sol.status;
  res.nodes = sol.nodes;
  res.schedule = Schedule::empty(inst, "insertion");
  if (!sol.has_solution()) return res;
  res.has_solution = true;
  const auto& x = sol.values;
  auto val = [&](const std::string& id) { return x[*m.find_variable(id)]; };
  res.objective = sol.objective / kMoney;

  double total_w = 0.0;
  std::vector<int> small_visits(inst.contracts.size(), 0);
  for (const auto& vn : nb.vessels) {
    const std::size_t k = vn.vessel;
    const Vessel& v = inst.vessels[k];
    VesselSchedule& vs = res.schedule.vessels[k];
    auto leg_of = [&](std::size_t l) {
      const InsertionLeg& il = nb.legs[l];
      return Leg{il.speed, il.fuel_mode, il.sail_hours, il.idle_hours, il.lng_burn, il.fuel_cost};
    };
    auto big_call = [&](std::size_t c, int day) {
      PortCall call;
      call.contract = c;
      call.port = inst.contracts[c].port;
      call.day = day;
      call.volume = val("V" + sid(c)) / kVol;
      call.free_purchase = val("F" + sid(c)) / kVol;
      if (inst.contracts[c].is_sell()) call.over_delivery = val("W" + sid(c)) / kVol;
      total_w += call.over_delivery;
      return call;
    };
    auto push = [&](const PortCall& c, double& vol) {
      if (c.kind == CallKind::contract) vol += inst.contracts[c.contract].is_buy() ? c.volume : -c.volume;
      vol += c.free_purchase - c.over_delivery;
      vs.calls.push_back(c);
      vs.onboard.push_back(vol);
    };

    double vol = v.initial_volume;
    PortCall start;
    start.kind = CallKind::start;
    start.port = v.initial_port;
    start.day = v.rent_start;
    start.free_purchase = val("O" + sid(k)) / kVol;
    push(start, vol);
    vs.legs.push_back(leg_of(vn.initial_leg));
    vol -= nb.legs[vn.initial_leg].lng_burn;
    for (std::size_t pi = 0; pi < vn.pairs.size(); ++pi) {
      const auto& p = vn.pairs[pi];
      push(big_call(p.start_contract, p.start_day), vol);
      const double A = val("A" + sid(k) + "_" + sid(pi)) / kVol;
      const double E = val("E" + sid(k) + "_" + sid(pi)) / kVol;
      double small_sum = 0.0, burn_sum = 0.0;
      std::size_t at = p.start_contract;
      while (at != p.end_contract) {
        std::size_t next_leg = kNoContract;
        for (std::size_t l : p.legs)
          if (nb.legs[l].from_contract == at && x[l] > 0.5) {
            next_leg = l;
            break;
          }
        if (next_leg == kNoContract) {
          res.audit_failures.push_back("route of vessel " + v.id + " breaks inside pair " + sid(pi));
          break;
        }
        vs.legs.push_back(leg_of(next_leg));
        vol -= nb.legs[next_leg].lng_burn;
        burn_sum += nb.legs[next_leg].lng_burn;
        at = nb.legs[next_leg].to_contract;
        if (at == p.end_contract) break;
        PortCall sc;
        sc.contract = at;
        sc.port = inst.contracts[at].port;
        sc.day = inst.contracts[at].midpoint();
        sc.volume = val("S" + sid(k) + "_" + sid(at)) / kVol;
        small_sum += sc.volume;
        ++small_visits[at];
        ++res.small_served;
        push(sc, vol);
      }
      // Audits restated outside the solver.
      const double tol = kVolumeTolerance;
      if (std::abs(E - (A - small_sum - burn_sum)) > tol)
        res.audit_failures.push_back("telescoping identity fails for vessel " + v.id + " pair " + sid(pi));
      const double lo = p.laden ? v.laden_floor() : 0.0;
      const double hi = p.laden ? v.fill_capacity() : v.ballast_ceiling();
      const double hi_model = p.laden && opt.laden_upper_is_capacity ? v.capacity : hi;
      if (E < lo - tol || A > hi_model + tol || E > A + tol)
        res.audit_failures.push_back("sloshing band fails for vessel " + v.id + " pair " + sid(pi));
    }
    if (!vn.pairs.empty()) push(big_call(vn.pairs.back().end_contract, vn.pairs.back().end_day), vol);
    const double Z = val("Z" + sid(k)) / kVol;
    if (Z < vn.final_requirement - kVolumeTolerance || Z > v.ballast_ceiling() + kVolumeTolerance ||
        std::abs(Z - vol) > kVolumeTolerance)
      res.audit_failures.push_back("final volume bound fails for vessel " + v.id);
    vs.legs.push_back(leg_of(vn.final_leg));
    vol -= nb.legs[vn.final_leg].lng_burn;
    PortCall end;
    end.kind = CallKind::end;
    end.port = v.final_port;
    end.day = nb.legs[vn.final_leg].to_day;
    push(end, vol);
  }
  for (std::size_t c = 0; c < small_visits.size(); ++c)
    if (small_visits[c] > 1) res.audit_failures.push_back("small sell " + inst.contracts[c].id + " served twice");

  res.penalty = res.omega * total_w;
  res.schedule.penalty = res.penalty;
  const ProfitBreakdown pb = evaluate_profit(res.schedule, inst);
  if (std::abs(pb.net - res.penalty - res.objective) > std::max(1.0, 1e-9 * std::abs(res.objective)))
    res.audit_failures.push_back("objective decomposition differs from the evaluated profit");
  return res;
}

}  // namespace lngopt
