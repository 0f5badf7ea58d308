#include "lngopt/trips.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "lngopt/instance_io.hpp"

namespace lngopt {

const char* to_string(TripKind kind) {
  switch (kind) {
    case TripKind::initial: return "initial";
    case TripKind::laden: return "laden";
    case TripKind::ballast: return "ballast";
    case TripKind::final: return "final";
  }
  return "?";
}

int travel_time(const Contract& from, const Contract& to) {
  return to.release - from.release + (to.deadline - to.release) / 2 - (from.deadline - from.release) / 2 - 1;
}

namespace {

// Consumption rows of one (mode, laden) combination, sorted by speed.
struct RowSet {
  std::vector<double> speed;
  std::vector<double> lng_rate;   // consumption + boil-off, m3/h
  std::vector<double> fuel_rate;  // money/h

  bool empty() const { return speed.empty(); }
  std::optional<std::size_t> pick(double distance, double time_days) const {
    if (speed.empty()) return std::nullopt;
    if (distance <= 0.0) return std::size_t{0};
    if (time_days <= 0.0) return std::nullopt;
    const double need = distance / (24.0 * time_days);
    for (std::size_t i = 0; i < speed.size(); ++i)
      if (speed[i] >= need * (1.0 - 1e-12)) return i;
    return std::nullopt;
  }
};

RowSet row_set(const Vessel& v, FuelMode mode, bool laden) {
  RowSet rs;
  for (const auto& r : v.rows(mode, laden)) {
    rs.speed.push_back(r.speed);
    rs.lng_rate.push_back((mode == FuelMode::fuel_only ? 0.0 : r.consumption) + r.boil_off);
    rs.fuel_rate.push_back(mode == FuelMode::lng_only ? 0.0 : r.fuel_cost_rate);
  }
  return rs;
}

}  // namespace

std::optional<double> select_speed(const Vessel& vessel, FuelMode mode, bool laden, double distance,
                                   double time_days) {
  auto rs = row_set(vessel, mode, laden);
  auto i = rs.pick(distance, time_days);
  if (!i) return std::nullopt;
  return rs.speed[*i];
}

LegBurn leg_burn(const Vessel& vessel, FuelMode mode, bool laden, double speed, double sail_hours,
                 double idle_hours) {
  auto rs = row_set(vessel, mode, laden);
  for (std::size_t i = 0; i < rs.speed.size(); ++i) {
    if (std::abs(rs.speed[i] - speed) > 1e-9) continue;
    return {sail_hours * rs.lng_rate[i] + idle_hours * vessel.idle_boil_off / 24.0, sail_hours * rs.fuel_rate[i]};
  }
  throw std::invalid_argument("vessel " + vessel.id + ": no " + to_string(mode) + (laden ? " laden" : " ballast") +
                              " row at speed " + format_double(speed));
}

double penalize(const Trip& trip, const PenaltyParams& params) {
  return trip.profit - params.over_delivery_penalty * trip.over_delivery +
         params.potential_reward * static_cast<double>(trip.potential);
}

double trip_profit(const Trip& t, const Instance& inst) {
  switch (t.kind) {
    case TripKind::laden:
      return inst.contracts[t.end_contract].price_on(t.end_day) * t.traded_volume -
             inst.contracts[t.start_contract].price_on(t.start_day) * t.buy_volume - t.fuel_cost;
    case TripKind::initial:
      return -(t.fuel_cost + inst.free_prices(t.start_port, t.start_day) * t.free_purchase);
    case TripKind::ballast:
    case TripKind::final:
      return -(t.fuel_cost + inst.free_prices(t.start_port, t.start_day) * t.lng_burn);
  }
  return 0.0;
}

double over_delivery(const Trip& t, const Instance& inst) {
  if (t.kind != TripKind::laden) return 0.0;
  return std::max(0.0, inst.contracts[t.start_contract].v_min - inst.contracts[t.end_contract].v_max - t.lng_burn);
}

namespace {

// Small sells a vessel could visit between (p1, d1) and (p2, d2), each
// checked on its own with direct legs at the vessel's top speed.
int potential(const Instance& inst, const std::vector<std::size_t>& small_sells, double top_speed, std::size_t p1,
              int d1, std::size_t p2, int d2, std::size_t skip_a, std::size_t skip_b) {
  int n = 0;
  for (std::size_t c : small_sells) {
    if (c == skip_a || c == skip_b) continue;
    const Contract& s = inst.contracts[c];
    const int m = s.midpoint();
    if (m <= d1 || m >= d2) continue;
    const double a = inst.distance(p1, s.port) / (24.0 * top_speed);
    const double b = inst.distance(s.port, p2) / (24.0 * top_speed);
    if (a <= (m - d1 - 1) + 1e-12 && b <= (d2 - m - 1) + 1e-12) ++n;
  }
  return n;
}

std::vector<std::size_t> small_sell_ids(const Instance& inst) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < inst.contracts.size(); ++c)
    if (inst.contracts[c].is_sell() && is_small(inst, inst.contracts[c])) out.push_back(c);
  return out;
}

}  // namespace

int multi_destination_potential(const Trip& t, const Instance& inst) {
  if (t.kind != TripKind::laden && t.kind != TripKind::ballast) return 0;
  return potential(inst, small_sell_ids(inst), inst.vessels[t.vessel].max_speed(), t.start_port, t.start_day,
                   t.end_port, t.end_day, t.start_contract, t.end_contract);
}

std::size_t TripSet::count(TripKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(trips.begin(), trips.end(), [&](const Trip& t) { return t.kind == kind; }));
}

double TripSet::max_abs_profit() const {
  double m = 0.0;
  for (const auto& t : trips) m = std::max(m, std::abs(t.profit));
  return m;
}

int TripSet::max_potential() const {
  int m = 0;
  for (const auto& t : trips) m = std::max(m, t.potential);
  return m;
}

TripSet generate_trips(const Instance& inst) {
  TripSet out;
  const auto small = small_sell_ids(inst);
  const int max_gap = inst.max_trip_days > 0 ? inst.max_trip_days : inst.horizon_days;
  std::vector<std::size_t> buys, sells;
  for (std::size_t c = 0; c < inst.contracts.size(); ++c) (inst.contracts[c].is_buy() ? buys : sells).push_back(c);

  for (std::size_t k = 0; k < inst.vessels.size(); ++k) {
    const Vessel& v = inst.vessels[k];
    const double C = v.capacity;
    const double fill = v.fill_capacity();
    const double low = v.ballast_ceiling();
    const double high = v.laden_floor();
    const double top = v.max_speed();
    const auto modes = v.fuel_modes();
    std::vector<RowSet> laden_rows, ballast_rows;
    for (auto m : modes) {
      laden_rows.push_back(row_set(v, m, true));
      ballast_rows.push_back(row_set(v, m, false));
    }
    auto first_day = [&](const Contract& c) { return std::max(c.release, v.rent_start); };
    auto last_day = [&](const Contract& c) { return std::min(c.deadline, v.rent_end); };

    // Fills sail/idle/burn/fuel for a leg of `days` whole days; the first
    // `port_hours` are spent idle in port before sailing.
    auto make_leg = [&](Trip& t, const RowSet& rs, double distance, double sail_days, double total_hours) {
      auto i = rs.pick(distance, sail_days);
      if (!i) return false;
      t.speed = rs.speed[*i];
      t.sail_hours = distance > 0.0 ? distance / t.speed : 0.0;
      t.idle_hours = std::max(0.0, total_hours - t.sail_hours);
      t.lng_burn = t.sail_hours * rs.lng_rate[*i] + t.idle_hours * v.idle_boil_off / 24.0;
      t.fuel_cost = t.sail_hours * rs.fuel_rate[*i];
      return true;
    };

    // Initial trips: from the start port at rent start to a buy.
    const bool start_laden = v.initial_volume >= high;
    for (std::size_t b : buys) {
      const Contract& cb = inst.contracts[b];
      for (int d = first_day(cb); d <= last_day(cb); ++d) {
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
          Trip t;
          t.kind = TripKind::initial;
          t.vessel = k;
          t.start_port = v.initial_port;
          t.start_day = v.rent_start;
          t.end_contract = b;
          t.end_port = cb.port;
          t.end_day = d;
          t.fuel_mode = modes[mi];
          t.laden = start_laden;
          const double days = d - v.rent_start;
          if (!make_leg(t, start_laden ? laden_rows[mi] : ballast_rows[mi], inst.distance(v.initial_port, cb.port),
                        days, 24.0 * days))
            continue;
          double heel = 0.0;
          if (start_laden) {
            if (v.initial_volume - t.lng_burn < high) continue;
            heel = v.initial_volume - t.lng_burn;
          } else {
            t.free_purchase = std::max(0.0, t.lng_burn - v.initial_volume);
            if (std::max(v.initial_volume, t.lng_burn) > low) continue;
            heel = std::max(0.0, v.initial_volume - t.lng_burn);
          }
          if (cb.v_min + heel > fill) continue;
          t.profit = trip_profit(t, inst);
          out.trips.push_back(t);
        }
      }
    }

    // Laden trips: buy -> sell.
    for (std::size_t b : buys) {
      const Contract& cb = inst.contracts[b];
      if (cb.v_min > fill) continue;
      for (std::size_t s : sells) {
        const Contract& cs = inst.contracts[s];
        const double dist = inst.distance(cb.port, cs.port);
        for (int d1 = first_day(cb); d1 <= last_day(cb); ++d1) {
          for (int d2 = std::max(first_day(cs), d1 + 1); d2 <= std::min(last_day(cs), d1 + max_gap); ++d2) {
            const double ub = cb.price_on(d1), us = cs.price_on(d2);
            for (std::size_t mi = 0; mi < modes.size(); ++mi) {
              Trip t;
              t.kind = TripKind::laden;
              t.vessel = k;
              t.start_contract = b;
              t.start_port = cb.port;
              t.start_day = d1;
              t.end_contract = s;
              t.end_port = cs.port;
              t.end_day = d2;
              t.fuel_mode = modes[mi];
              t.laden = true;
              if (!make_leg(t, laden_rows[mi], dist, d2 - d1 - 1, 24.0 * (d2 - d1))) continue;
              const double burn = t.lng_burn;
              const double lo = std::max({cb.v_min, high + burn, cs.v_min + burn});
              const double hi = std::min(cb.v_max, fill);
              if (lo > hi) continue;
              auto value = [&](double vb) { return us * std::min(cs.v_max, vb - burn) - ub * vb; };
              double cand[3] = {lo, std::clamp(cs.v_max + burn, lo, hi), hi};
              std::sort(cand, cand + 3);
              double best_v = cand[0], best = value(cand[0]);
              for (double c : cand) {
                double val = value(c);
                if (val > best + 1e-9 * std::max(1.0, std::abs(best))) {
                  best = val;
                  best_v = c;
                }
              }
              t.buy_volume = best_v;
              t.traded_volume = std::min(cs.v_max, best_v - burn);
              t.over_delivery = over_delivery(t, inst);
              t.profit = trip_profit(t, inst);
              t.potential = potential(inst, small, top, cb.port, d1, cs.port, d2, b, s);
              out.trips.push_back(t);
            }
          }
        }
      }
    }

    // Ballast trips: sell -> buy.
    for (std::size_t s : sells) {
      const Contract& cs = inst.contracts[s];
      for (std::size_t b : buys) {
        const Contract& cb = inst.contracts[b];
        if (cb.v_min > fill) continue;
        const double dist = inst.distance(cs.port, cb.port);
        for (int d1 = first_day(cs); d1 <= last_day(cs); ++d1) {
          for (int d2 = std::max(first_day(cb), d1 + 1); d2 <= std::min(last_day(cb), d1 + max_gap); ++d2) {
            for (std::size_t mi = 0; mi < modes.size(); ++mi) {
              Trip t;
              t.kind = TripKind::ballast;
              t.vessel = k;
              t.start_contract = s;
              t.start_port = cs.port;
              t.start_day = d1;
              t.end_contract = b;
              t.end_port = cb.port;
              t.end_day = d2;
              t.fuel_mode = modes[mi];
              t.laden = false;
              if (!make_leg(t, ballast_rows[mi], dist, d2 - d1 - 1, 24.0 * (d2 - d1))) continue;
              if (t.lng_burn > low) continue;
              t.free_purchase = t.lng_burn;
              t.profit = trip_profit(t, inst);
              t.potential = potential(inst, small, top, cs.port, d1, cb.port, d2, s, b);
              out.trips.push_back(t);
            }
          }
        }
      }
    }

    // Final trips: sell -> end port, arriving by rent end.
    for (std::size_t s : sells) {
      const Contract& cs = inst.contracts[s];
      const double dist = inst.distance(cs.port, v.final_port);
      for (int d = first_day(cs); d <= last_day(cs); ++d) {
        if (d + 1 > v.rent_end) continue;
        for (std::size_t mi = 0; mi < modes.size(); ++mi) {
          Trip t;
          t.kind = TripKind::final;
          t.vessel = k;
          t.start_contract = s;
          t.start_port = cs.port;
          t.start_day = d;
          t.end_port = v.final_port;
          t.fuel_mode = modes[mi];
          t.laden = false;
          auto i = ballast_rows[mi].pick(dist, v.rent_end - d - 1);
          if (!i) continue;
          t.speed = ballast_rows[mi].speed[*i];
          t.sail_hours = dist > 0.0 ? dist / t.speed : 0.0;
          t.idle_hours = 24.0;
          t.lng_burn = t.sail_hours * ballast_rows[mi].lng_rate[*i] + v.idle_boil_off;
          t.fuel_cost = t.sail_hours * ballast_rows[mi].fuel_rate[*i];
          t.end_day = d + 1 + static_cast<int>(std::ceil(t.sail_hours / 24.0 - 1e-9));
          if (t.end_day > v.rent_end || t.lng_burn > low) continue;
          t.free_purchase = t.lng_burn;
          t.profit = trip_profit(t, inst);
          out.trips.push_back(t);
        }
      }
    }
  }

  // Indices.
  out.by_contract.assign(inst.contracts.size(), {});
  out.initial.assign(inst.vessels.size(), {});
  out.final.assign(inst.vessels.size(), {});
  std::map<std::tuple<std::size_t, std::size_t, int>, std::size_t> service_index;
  auto service = [&](std::size_t v, std::size_t c, int d) -> TripSet::Service& {
    auto [it, inserted] = service_index.emplace(std::make_tuple(v, c, d), 0);
    if (inserted) {
      it->second = out.services.size();
      out.services.push_back({v, c, d, {}, {}});
    }
    return out.services[it->second];
  };
  for (std::size_t i = 0; i < out.trips.size(); ++i) {
    Trip& t = out.trips[i];
    t.id = i;
    if (t.kind == TripKind::laden) {
      out.by_contract[t.start_contract].push_back(i);
      out.by_contract[t.end_contract].push_back(i);
    }
    if (t.kind == TripKind::initial) out.initial[t.vessel].push_back(i);
    if (t.kind == TripKind::final) out.final[t.vessel].push_back(i);
    if (t.end_contract != kNoContract) service(t.vessel, t.end_contract, t.end_day).arriving.push_back(i);
    if (t.start_contract != kNoContract) service(t.vessel, t.start_contract, t.start_day).departing.push_back(i);
  }
  // Deterministic order of services by key.
  std::vector<TripSet::Service> sorted;
  sorted.reserve(out.services.size());
  for (const auto& [key, idx] : service_index) sorted.push_back(std::move(out.services[idx]));
  out.services = std::move(sorted);
  return out;
}

void write_trips_csv(std::ostream& out, const Instance& inst, const TripSet& set) {
  out << "id,kind,vessel,start,start_day,end,end_day,speed,fuel_mode,sail_hours,idle_hours,lng_burn,fuel_cost,"
         "buy_volume,traded_volume,free_purchase,profit,over_delivery,potential\n";
  auto where = [&](std::size_t contract, std::size_t port) {
    return contract == kNoContract ? inst.ports[port].id : inst.contracts[contract].id;
  };
  for (const auto& t : set.trips) {
    out << t.id << ',' << to_string(t.kind) << ',' << inst.vessels[t.vessel].id << ','
        << where(t.start_contract, t.start_port) << ',' << t.start_day << ',' << where(t.end_contract, t.end_port)
        << ',' << t.end_day << ',' << format_double(t.speed) << ',' << to_string(t.fuel_mode) << ','
        << format_double(t.sail_hours) << ',' << format_double(t.idle_hours) << ',' << format_double(t.lng_burn)
        << ',' << format_double(t.fuel_cost) << ',' << format_double(t.buy_volume) << ','
        << format_double(t.traded_volume) << ',' << format_double(t.free_purchase) << ','
        << format_double(t.profit) << ',' << format_double(t.over_delivery) << ',' << t.potential << '\n';
  }
}

}  // namespace lngopt
