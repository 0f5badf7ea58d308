#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "fixtures.hpp"
#include "lngopt/generator.hpp"
#include "lngopt/trips.hpp"

using namespace lngopt;

namespace {

Contract window(int r, int d) {
  Contract c;
  c.release = r;
  c.deadline = d;
  return c;
}

// Speeds 16 .. 20.5 kn in steps of 0.5.
Vessel stepped_vessel() {
  Vessel v;
  v.id = "V";
  v.capacity = 150000.0;
  for (int i = 0; i < 10; ++i) {
    const double s = 16.0 + 0.5 * i;
    v.consumption.push_back({FuelMode::lng_only, true, s, 0.01 * s, 1.0, 0.0});
  }
  return v;
}

// Buy at P0 on day 0, sell at P1 on day 20; 2400 nm.
Instance one_pair(double sell_v_max = 135000.0) {
  fixtures::Builder b(30);
  b.vessel("V1");
  b.buy("B", 0, 0, 0, 120000, 140000, 100.0);
  b.sell("S", 1, 20, 20, 100000, sell_v_max, 150.0);
  return b.build();
}

const Trip* find_trip(const TripSet& set, TripKind kind, FuelMode mode) {
  for (const auto& t : set.trips)
    if (t.kind == kind && t.fuel_mode == mode) return &t;
  return nullptr;
}

}  // namespace

TEST(TravelTime, FormulaExamples) {
  EXPECT_EQ(travel_time(window(0, 1), window(10, 11)), 9);
  EXPECT_EQ(travel_time(window(0, 0), window(0, 0)), -1);
  EXPECT_EQ(travel_time(window(5, 9), window(6, 6)), -2);
}

TEST(SelectSpeed, RoundsUpToTableSpeed) {
  const Vessel v = stepped_vessel();
  // 18.2 kn over one day.
  EXPECT_EQ(select_speed(v, FuelMode::lng_only, true, 18.2 * 24.0, 1.0), 18.5);
  EXPECT_EQ(select_speed(v, FuelMode::lng_only, true, 0.0, 3.0), 16.0);
  EXPECT_EQ(select_speed(v, FuelMode::lng_only, true, 0.0, 0.0), 16.0);
  EXPECT_FALSE(select_speed(v, FuelMode::lng_only, true, 21.0 * 24.0, 1.0));
  EXPECT_FALSE(select_speed(v, FuelMode::lng_only, false, 10.0, 1.0));  // no ballast rows
}

TEST(LegBurn, TableRowsAndIdle) {
  Vessel v;
  v.id = "Seal";
  v.idle_boil_off = 48.0;
  v.consumption.push_back({FuelMode::lng_only, true, 20.0, 9.06e-6, 8.29e-6, 0.0});
  v.consumption.push_back({FuelMode::fuel_only, true, 20.0, 0.0, 8.29e-6, 12.5});
  const LegBurn a = leg_burn(v, FuelMode::lng_only, true, 20.0, 100.0, 0.0);
  EXPECT_NEAR(a.lng_used, 100.0 * (9.06e-6 + 8.29e-6), 1e-15);
  EXPECT_EQ(a.fuel_cost, 0.0);

  const LegBurn idle = leg_burn(v, FuelMode::lng_only, true, 20.0, 0.0, 24.0);
  EXPECT_DOUBLE_EQ(idle.lng_used, 48.0);
  EXPECT_EQ(idle.fuel_cost, 0.0);

  const LegBurn f = leg_burn(v, FuelMode::fuel_only, true, 20.0, 10.0, 0.0);
  EXPECT_NEAR(f.lng_used, 10.0 * 8.29e-6, 1e-15);
  EXPECT_DOUBLE_EQ(f.fuel_cost, 125.0);

  EXPECT_THROW(leg_burn(v, FuelMode::lng_only, false, 20.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(leg_burn(v, FuelMode::lng_only, true, 19.0, 1.0, 0.0), std::invalid_argument);
}

TEST(TripMetrics, OverDeliveryAndPenalty) {
  fixtures::Builder b(30);
  b.vessel("V1");
  b.buy("B", 0, 0, 0, 140000, 145000, 1.0);
  b.sell("S1", 1, 20, 20, 1000, 130000, 1.0);
  b.sell("S2", 1, 20, 20, 1000, 150000, 1.0);
  b.sell("S3", 1, 20, 20, 1000, 138000, 1.0);
  const Instance inst = b.build();
  Trip t;
  t.kind = TripKind::laden;
  t.start_contract = 0;
  t.lng_burn = 2000.0;
  t.end_contract = 1;
  EXPECT_DOUBLE_EQ(over_delivery(t, inst), 8000.0);
  t.end_contract = 2;
  EXPECT_EQ(over_delivery(t, inst), 0.0);
  t.end_contract = 3;  // 140000 - 138000 - 2000
  EXPECT_EQ(over_delivery(t, inst), 0.0);

  t.profit = 100.0;
  t.over_delivery = 2.0;
  t.potential = 3;
  EXPECT_DOUBLE_EQ(penalize(t, {10.0, 5.0}), 95.0);
  EXPECT_DOUBLE_EQ(penalize(t, {0.0, 0.0}), 100.0);
  EXPECT_LT(penalize(t, {20.0, 5.0}), penalize(t, {10.0, 5.0}));
}

TEST(GenerateTrips, SinglePairHandEnumeration) {
  const Instance inst = one_pair();
  const TripSet set = generate_trips(inst);
  EXPECT_EQ(set.count(TripKind::initial), 2u);
  EXPECT_EQ(set.count(TripKind::laden), 2u);
  EXPECT_EQ(set.count(TripKind::ballast), 0u);
  EXPECT_EQ(set.count(TripKind::final), 2u);

  // 2400 nm in 19 days needs 5.3 kn: the 10 kn row. 240 h at sea and 240 h idle.
  const Trip* lng = find_trip(set, TripKind::laden, FuelMode::lng_only);
  ASSERT_TRUE(lng);
  EXPECT_EQ(lng->speed, 10.0);
  EXPECT_DOUBLE_EQ(lng->sail_hours, 240.0);
  EXPECT_DOUBLE_EQ(lng->idle_hours, 240.0);
  const double burn = 240.0 * (1.1 * 0.02 * 100.0 + 2.0) + 240.0 * 100.0 / 24.0;
  EXPECT_NEAR(lng->lng_burn, burn, 1e-9);
  // Buy just enough to deliver the sell maximum.
  EXPECT_NEAR(lng->buy_volume, 135000.0 + burn, 1e-9);
  EXPECT_NEAR(lng->traded_volume, 135000.0, 1e-9);
  EXPECT_NEAR(lng->profit, 150.0 * 135000.0 - 100.0 * (135000.0 + burn), 1e-6);
  EXPECT_EQ(lng->over_delivery, 0.0);
  EXPECT_EQ(lng->potential, 0);

  const Trip* fuel = find_trip(set, TripKind::laden, FuelMode::fuel_only);
  ASSERT_TRUE(fuel);
  const double fuel_burn = 240.0 * 2.0 + 1000.0;
  const double fuel_cost = 240.0 * 30.0 * 1.1 * 0.02 * 100.0;
  EXPECT_NEAR(fuel->lng_burn, fuel_burn, 1e-9);
  EXPECT_NEAR(fuel->fuel_cost, fuel_cost, 1e-9);
  EXPECT_NEAR(fuel->profit, 150.0 * 135000.0 - 100.0 * (135000.0 + fuel_burn) - fuel_cost, 1e-6);

  // Final leg: 2400 nm in 29 - 20 - 1 = 8 days needs 12.5 kn: the 15 kn row.
  const Trip* fin = find_trip(set, TripKind::final, FuelMode::lng_only);
  ASSERT_TRUE(fin);
  EXPECT_EQ(fin->speed, 15.0);
  EXPECT_EQ(fin->end_port, 0u);
  EXPECT_LE(fin->end_day, 29);
}

TEST(GenerateTrips, ProfitCapsAtBuyWhenSellIsLarge) {
  const Instance inst = one_pair(200000.0);
  const Trip* t = find_trip(generate_trips(inst), TripKind::laden, FuelMode::lng_only);
  ASSERT_TRUE(t);
  // Every extra m3 bought is sold at a margin: buy the maximum.
  EXPECT_DOUBLE_EQ(t->buy_volume, 140000.0);
  EXPECT_NEAR(t->traded_volume, 140000.0 - t->lng_burn, 1e-9);
  EXPECT_NEAR(trip_profit(*t, inst), t->profit, 1e-9);
}

TEST(GenerateTrips, OverDeliveryTripsAreKept) {
  fixtures::Builder b(30);
  b.vessel("V1");
  b.buy("B", 0, 0, 0, 140000, 140000, 100.0);
  b.sell("S", 1, 20, 20, 10000, 120000, 150.0);
  const Instance inst = b.build();
  const Trip* t = find_trip(generate_trips(inst), TripKind::laden, FuelMode::lng_only);
  ASSERT_TRUE(t);
  EXPECT_NEAR(t->over_delivery, 140000.0 - 120000.0 - t->lng_burn, 1e-9);
  EXPECT_DOUBLE_EQ(t->traded_volume, 120000.0);
}

TEST(GenerateTrips, SellBeforeBuyHasNoLadenTrip) {
  fixtures::Builder b(30);
  b.vessel("V1");
  b.buy("B", 0, 20, 20, 120000, 140000, 100.0);
  b.sell("S", 1, 2, 2, 100000, 135000, 150.0);
  const TripSet set = generate_trips(b.build());
  EXPECT_EQ(set.count(TripKind::laden), 0u);
}

TEST(GenerateTrips, OversizedBuyAppearsInNoTrip) {
  fixtures::Builder b(30);
  b.vessel("V1");
  b.buy("B", 0, 0, 0, 148000, 149000, 100.0);  // above 0.985 * 150000
  b.sell("S", 1, 20, 20, 100000, 135000, 150.0);
  const TripSet set = generate_trips(b.build());
  EXPECT_TRUE(set.by_contract[0].empty());
  for (const auto& t : set.trips) {
    EXPECT_NE(t.start_contract, 0u);
    EXPECT_NE(t.end_contract, 0u);
  }
}

TEST(GenerateTrips, SamePortTripBurnsIdleBoilOffOnly) {
  fixtures::Builder b(30);
  b.vessel("V1");
  b.buy("B", 0, 0, 0, 120000, 140000, 100.0);
  b.sell("S", 0, 2, 2, 100000, 135000, 150.0);
  const Trip* t = find_trip(generate_trips(b.build()), TripKind::laden, FuelMode::lng_only);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->sail_hours, 0.0);
  EXPECT_DOUBLE_EQ(t->lng_burn, 2.0 * 100.0);
}

TEST(GenerateTrips, PotentialCountsReachableSmallSells) {
  fixtures::Builder b(40, {0.0, 1200.0, 2400.0});
  b.vessel("V1");
  b.buy("B", 0, 0, 0, 120000, 140000, 100.0);
  b.sell("S", 2, 20, 20, 100000, 135000, 150.0);
  b.sell("on_route", 1, 9, 11, 10000, 20000, 160.0);  // midpoint 10
  b.sell("too_early", 1, 0, 0, 10000, 20000, 160.0);  // window closes before the buy
  const Instance inst = b.build();
  const TripSet set = generate_trips(inst);
  bool seen = false;
  for (const auto& t : set.trips) {
    if (t.kind != TripKind::laden || t.start_contract != 0 || t.end_contract != 1) continue;
    seen = true;
    EXPECT_EQ(t.potential, 1);
    EXPECT_EQ(multi_destination_potential(t, inst), 1);
  }
  EXPECT_TRUE(seen);
}

TEST(GenerateTrips, PropertiesOnGeneratedInstances) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    GeneratorParams p;
    p.n_vessels = 2;
    p.n_buy = 6;
    p.n_sell = 18;
    p.horizon_days = 120;
    p.small_fraction = seed % 3 == 0 ? 0.0 : 0.5;
    const Instance inst = generate_instance(seed, p);
    const TripSet set = generate_trips(inst);
    ASSERT_FALSE(set.trips.empty());
    const bool any_small = std::any_of(inst.contracts.begin(), inst.contracts.end(),
                                       [&](const Contract& c) { return c.is_sell() && is_small(inst, c); });
    std::size_t arriving = 0, departing = 0;
    for (const auto& s : set.services) {
      arriving += s.arriving.size();
      departing += s.departing.size();
      for (std::size_t t : s.arriving) {
        EXPECT_EQ(set.trips[t].end_contract, s.contract);
        EXPECT_EQ(set.trips[t].end_day, s.day);
        EXPECT_EQ(set.trips[t].vessel, s.vessel);
      }
      for (std::size_t t : s.departing) {
        EXPECT_EQ(set.trips[t].start_contract, s.contract);
        EXPECT_EQ(set.trips[t].start_day, s.day);
      }
    }
    EXPECT_EQ(arriving, set.trips.size() - set.count(TripKind::final));
    EXPECT_EQ(departing, set.trips.size() - set.count(TripKind::initial));

    for (const auto& t : set.trips) {
      const Vessel& v = inst.vessels[t.vessel];
      EXPECT_EQ(penalize(t, {}), t.profit);
      EXPECT_GE(t.over_delivery, 0.0);
      EXPECT_GE(t.potential, 0);
      if (!any_small) EXPECT_EQ(t.potential, 0);
      EXPECT_GE(t.end_day, t.start_day + (t.kind == TripKind::initial ? 0 : 1));
      EXPECT_GE(t.start_day, v.rent_start);
      EXPECT_LE(t.end_day, v.rent_end);
      const auto rows = v.rows(t.fuel_mode, t.laden);
      EXPECT_TRUE(std::any_of(rows.begin(), rows.end(), [&](const ConsumptionRow& r) { return r.speed == t.speed; }));
      if (t.start_contract != kNoContract) EXPECT_TRUE(inst.contracts[t.start_contract].servable_on(t.start_day));
      if (t.end_contract != kNoContract) EXPECT_TRUE(inst.contracts[t.end_contract].servable_on(t.end_day));
      const LegBurn lb = leg_burn(v, t.fuel_mode, t.laden, t.speed, t.sail_hours, t.idle_hours);
      EXPECT_NEAR(lb.lng_used, t.lng_burn, 1e-9 * std::max(1.0, t.lng_burn));
      if (t.kind == TripKind::laden) {
        // Band at both ends of the laden leg.
        EXPECT_GE(t.buy_volume - t.lng_burn, v.laden_floor() - 1e-6);
        EXPECT_LE(t.buy_volume, v.fill_capacity() + 1e-6);
        EXPECT_LE(t.traded_volume, inst.contracts[t.end_contract].v_max + 1e-6);
        EXPECT_NEAR(t.profit, trip_profit(t, inst), 1e-6);
        EXPECT_EQ(t.potential, multi_destination_potential(t, inst));
      }
      if (t.kind == TripKind::ballast || t.kind == TripKind::final) EXPECT_LE(t.lng_burn, v.ballast_ceiling() + 1e-6);
    }
    // Deterministic.
    std::ostringstream a, b;
    write_trips_csv(a, inst, set);
    write_trips_csv(b, inst, generate_trips(inst));
    EXPECT_EQ(a.str(), b.str());
  }
}

// Independent enumeration of laden trips: every (buy day, sell day, mode)
// with a table speed fast enough and a feasible volume must be generated.
TEST(GenerateTrips, SupersetOfHandEnumeration) {
  std::vector<fixtures::Builder> builders;
  {
    fixtures::Builder b(30);
    b.vessel("V1");
    b.buy("B", 0, 0, 3, 120000, 140000, 100.0);
    b.sell("S", 1, 10, 16, 100000, 135000, 150.0);
    builders.push_back(b);
  }
  {
    fixtures::Builder b(40, {0.0, 1500.0, 4000.0});
    b.vessel("V1");
    b.vessel("V2", 120000.0);
    b.buy("B1", 0, 0, 4, 90000, 110000, 90.0);
    b.buy("B2", 1, 15, 18, 100000, 115000, 95.0);
    b.sell("S1", 2, 8, 14, 80000, 120000, 150.0);
    b.sell("S2", 1, 25, 30, 60000, 100000, 140.0);
    builders.push_back(b);
  }
  {
    fixtures::Builder b(25, {0.0, 6000.0});
    b.vessel("V1");
    b.buy("B", 0, 0, 2, 120000, 140000, 100.0);
    b.sell("S", 1, 8, 20, 100000, 135000, 150.0);  // 6000 nm is out of reach for early days
    builders.push_back(b);
  }
  for (auto& b : builders) {
    const Instance inst = b.build();
    const TripSet set = generate_trips(inst);
    std::set<std::tuple<std::size_t, std::size_t, std::size_t, int, int, int>> generated;
    for (const auto& t : set.trips)
      if (t.kind == TripKind::laden)
        generated.insert({t.vessel, t.start_contract, t.end_contract, t.start_day, t.end_day,
                          static_cast<int>(t.fuel_mode)});
    std::size_t expected = 0;
    for (std::size_t k = 0; k < inst.vessels.size(); ++k) {
      const Vessel& v = inst.vessels[k];
      for (std::size_t bi = 0; bi < inst.contracts.size(); ++bi) {
        const Contract& cb = inst.contracts[bi];
        if (!cb.is_buy()) continue;
        for (std::size_t si = 0; si < inst.contracts.size(); ++si) {
          const Contract& cs = inst.contracts[si];
          if (!cs.is_sell()) continue;
          const double dist = std::abs(b.coord[cb.port] - b.coord[cs.port]);
          for (int d1 = cb.release; d1 <= cb.deadline; ++d1)
            for (int d2 = std::max(cs.release, d1 + 1); d2 <= cs.deadline; ++d2)
              for (FuelMode mode : {FuelMode::lng_only, FuelMode::fuel_only}) {
                const double days = d2 - d1 - 1;
                double speed = 0.0;
                for (double s : {10.0, 15.0, 20.0})
                  if (dist == 0.0 || (days > 0 && s * 24.0 * days >= dist)) {
                    speed = s;
                    break;
                  }
                if (speed == 0.0) continue;
                const double sail = dist / speed;
                const double rate = (mode == FuelMode::lng_only ? 1.1 * 0.02 * speed * speed : 0.0) + 2.0;
                const double burn = sail * rate + (24.0 * (d2 - d1) - sail) * v.idle_boil_off / 24.0;
                const double lo = std::max({cb.v_min, v.laden_floor() + burn, cs.v_min + burn});
                const double hi = std::min(cb.v_max, v.fill_capacity());
                if (lo > hi) continue;
                ++expected;
                EXPECT_TRUE(generated.count({k, bi, si, d1, d2, static_cast<int>(mode)}))
                    << v.id << " " << cb.id << "@" << d1 << " -> " << cs.id << "@" << d2;
              }
        }
      }
    }
    EXPECT_GT(expected, 0u);
    EXPECT_EQ(generated.size(), expected);
  }
}
