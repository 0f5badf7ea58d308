// Small hand-built instances for tests. Ports sit on a line, so distances are
// coordinate differences.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lngopt/instance.hpp"

namespace fixtures {

struct Builder {
  lngopt::Instance inst;
  std::vector<double> coord;
  double free_price = 200.0;

  explicit Builder(int horizon, std::vector<double> port_coords = {0.0, 2400.0}) : coord(std::move(port_coords)) {
    inst.name = "fixture";
    inst.horizon_days = horizon;
    for (std::size_t p = 0; p < coord.size(); ++p) inst.ports.push_back({"P" + std::to_string(p), ""});
  }

  // Table: LNG-only rows at 10/15/20 knots (laden and ballast), plus a
  // fuel-only row set so the main pipeline has a mode to choose from.
  static std::vector<lngopt::ConsumptionRow> table(double scale = 1.0) {
    std::vector<lngopt::ConsumptionRow> rows;
    for (bool laden : {false, true})
      for (double s : {10.0, 15.0, 20.0}) {
        const double cons = scale * (laden ? 1.1 : 1.0) * 0.02 * s * s;
        rows.push_back({lngopt::FuelMode::lng_only, laden, s, cons, 2.0 * scale, 0.0});
        rows.push_back({lngopt::FuelMode::fuel_only, laden, s, 0.0, 2.0 * scale, 30.0 * cons});
      }
    return rows;
  }

  lngopt::Vessel& vessel(const std::string& id, double capacity = 150000.0, int rent_start = 0, int rent_end = -1,
                         std::size_t initial_port = 0, std::size_t final_port = 0, double initial_volume = 0.0) {
    lngopt::Vessel v;
    v.id = id;
    v.capacity = capacity;
    v.consumption = table();
    v.idle_boil_off = 100.0;
    v.rent_start = rent_start;
    v.rent_end = rent_end < 0 ? inst.horizon_days - 1 : rent_end;
    v.initial_port = initial_port;
    v.final_port = final_port;
    v.initial_volume = initial_volume;
    inst.vessels.push_back(v);
    return inst.vessels.back();
  }

  lngopt::Contract& contract(const std::string& id, lngopt::ContractKind kind, std::size_t port, int release,
                             int deadline, double v_min, double v_max, double price) {
    lngopt::Contract c;
    c.id = id;
    c.kind = kind;
    c.port = port;
    c.release = release;
    c.deadline = deadline;
    c.v_min = v_min;
    c.v_max = v_max;
    c.unit_prices.assign(static_cast<std::size_t>(deadline - release + 1), price);
    inst.contracts.push_back(c);
    return inst.contracts.back();
  }
  lngopt::Contract& buy(const std::string& id, std::size_t port, int release, int deadline, double v_min,
                        double v_max, double price) {
    return contract(id, lngopt::ContractKind::buy, port, release, deadline, v_min, v_max, price);
  }
  lngopt::Contract& sell(const std::string& id, std::size_t port, int release, int deadline, double v_min,
                         double v_max, double price) {
    return contract(id, lngopt::ContractKind::sell, port, release, deadline, v_min, v_max, price);
  }

  lngopt::Instance build() {
    const std::size_t n = coord.size();
    inst.distances = lngopt::DistanceMatrix(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) inst.distances.set(a, b, std::abs(coord[a] - coord[b]));
    inst.free_prices = lngopt::PriceSeries(n, inst.horizon_days);
    for (std::size_t p = 0; p < n; ++p)
      for (int d = 0; d < inst.horizon_days; ++d) inst.free_prices.set(p, d, free_price);
    lngopt::check_invariants(inst);
    return inst;
  }
};

// P0 -- 1200 nm -- P1 -- 1200 nm -- P2. Buy at P0 on day 1, big sell at P2
// on day 21, and a small sell at P1 on day 11 paying 400. LNG costs 100
// everywhere and the detour through P1 burns exactly what the direct leg
// burns (1004 + 1004 = 2008), so routing through the small sell earns
// 5000 * (400 - 100) on top of the direct plan.
inline constexpr double kSmallSellMargin = 5000.0 * (400.0 - 100.0);

inline lngopt::Instance small_sell_en_route(bool with_small = true) {
  Builder b(30, {0.0, 1200.0, 2400.0});
  b.free_price = 100.0;
  auto& v = b.vessel("V1");
  std::erase_if(v.consumption,
                [](const lngopt::ConsumptionRow& r) { return r.fuel_mode == lngopt::FuelMode::fuel_only; });
  b.buy("B", 0, 1, 1, 120000, 147750, 100.0);
  b.sell("S", 2, 21, 21, 100000, 130000, 150.0);
  if (with_small) b.sell("s", 1, 11, 11, 0, 5000, 400.0);
  return b.build();
}

}  // namespace fixtures
