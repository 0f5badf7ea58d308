#include "lngopt/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lngopt {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    // 53 random bits mapped to [0,1); avoids distribution implementation drift.
    double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

double round_to(double x, double step) { return std::round(x / step) * step; }

std::vector<ConsumptionRow> consumption_table(Rng& rng, double capacity, bool dual_fuel) {
  const double scale = capacity / 160000.0;
  const double base = rng.uniform(5.0, 6.5) * scale;
  const double bo = 0.0011 * capacity / 24.0;
  const double fuel_price = rng.uniform(170.0, 230.0);
  std::vector<ConsumptionRow> rows;
  std::vector<FuelMode> modes{FuelMode::lng_only};
  if (dual_fuel) modes.push_back(FuelMode::fuel_only);
  for (FuelMode mode : modes) {
    for (bool laden : {true, false}) {
      for (double s = 20.5; s >= 16.0 - 1e-9; s -= 0.5) {
        ConsumptionRow r;
        r.fuel_mode = mode;
        r.laden = laden;
        r.speed = s;
        double cons = base * std::pow(s / 18.0, 3.0) * (laden ? 1.0 : 0.9);
        r.consumption = round_to(cons, 1e-3);
        r.boil_off = round_to(bo * (s >= 18.0 ? 1.0 : 0.85) * (laden ? 1.0 : 0.8), 1e-3);
        r.fuel_cost_rate = mode == FuelMode::lng_only ? 0.0 : round_to(cons * fuel_price, 0.01);
        rows.push_back(r);
      }
    }
  }
  return rows;
}

int draw_window(Rng& rng) { return rng.chance(0.7) ? 1 : rng.integer(2, 5); }

}  // namespace

Instance generate_instance(std::uint64_t seed, const GeneratorParams& p) {
  if (p.n_vessels <= 0 || p.n_buy <= 0 || p.n_sell <= 0 || p.n_ports < 2)
    throw std::invalid_argument("generator counts must be positive and n_ports >= 2");
  if (!(p.small_fraction >= 0.0 && p.small_fraction <= 1.0))
    throw std::invalid_argument("small_fraction must lie in [0, 1]");
  if (p.horizon_days < 60) throw std::invalid_argument("horizon_days must be at least 60");
  if (p.max_trip_days < 0) throw std::invalid_argument("max_trip_days must be non-negative");

  Rng rng(seed);
  Instance inst;
  inst.name = "gen-" + std::to_string(seed);
  inst.horizon_days = p.horizon_days;
  inst.max_trip_days = p.max_trip_days > 0 ? p.max_trip_days : 30;

  // Export terminals on the west side of the plane, import terminals east.
  const int n_export = std::max(1, p.n_ports / 3);
  std::vector<std::pair<double, double>> xy;
  for (int i = 0; i < p.n_ports; ++i) {
    bool exporter = i < n_export;
    std::string id = (exporter ? "EXP" : "IMP") + std::to_string(i);
    inst.ports.push_back({id, id});
    double x = exporter ? rng.uniform(0.0, 2000.0) : rng.uniform(1500.0, 5500.0);
    xy.emplace_back(x, rng.uniform(0.0, 3000.0));
  }
  inst.distances = DistanceMatrix(inst.ports.size());
  for (std::size_t a = 0; a < xy.size(); ++a)
    for (std::size_t b = a + 1; b < xy.size(); ++b)
      inst.distances.set(a, b, std::round(std::hypot(xy[a].first - xy[b].first, xy[a].second - xy[b].second)));

  // Free LNG price: regional level, seasonal swing, small random walk.
  inst.free_prices = PriceSeries(inst.ports.size(), p.horizon_days);
  const double phase = rng.uniform(0.0, 365.0);
  for (int port = 0; port < p.n_ports; ++port) {
    double level = port < n_export ? rng.uniform(160.0, 180.0) : rng.uniform(195.0, 225.0);
    double walk = 0.0;
    for (int d = 0; d < p.horizon_days; ++d) {
      walk = std::clamp(walk + rng.uniform(-1.0, 1.0), -15.0, 15.0);
      double f = level * (1.0 + 0.08 * std::sin(2.0 * M_PI * (d + phase) / 365.0)) + walk;
      inst.free_prices.set(static_cast<std::size_t>(port), d, round_to(f, 0.01));
    }
  }

  for (int k = 0; k < p.n_vessels; ++k) {
    Vessel v;
    v.id = "V" + std::to_string(k);
    v.capacity = 5000.0 * rng.integer(28, 35);
    v.consumption = consumption_table(rng, v.capacity, k % 2 == 0);
    v.idle_boil_off = round_to(0.0008 * v.capacity, 0.1);
    v.rent_start = rng.integer(0, 10);
    v.rent_end = p.horizon_days - 1 - rng.integer(0, 10);
    v.initial_port = static_cast<std::size_t>(rng.integer(0, p.n_ports - 1));
    v.final_port = static_cast<std::size_t>(rng.integer(0, p.n_ports - 1));
    v.initial_volume = round_to(rng.uniform(0.01, 0.05) * v.capacity, 1.0);
    inst.vessels.push_back(std::move(v));
  }
  const double max_cap = inst.max_capacity();

  auto unit_prices = [&](std::size_t port, int release, int deadline, double factor) {
    std::vector<double> out;
    for (int d = release; d <= deadline; ++d) out.push_back(round_to(inst.free_prices(port, d) * factor, 0.01));
    return out;
  };

  for (int i = 0; i < p.n_buy; ++i) {
    Contract c;
    c.id = "B" + std::to_string(i);
    c.kind = ContractKind::buy;
    c.port = static_cast<std::size_t>(rng.integer(0, n_export - 1));
    c.release = rng.integer(5, p.horizon_days - 30);
    c.deadline = std::min(p.horizon_days - 1, c.release + draw_window(rng) - 1);
    c.v_max = round_to(rng.uniform(0.88, 0.985) * max_cap, 10.0);
    c.v_min = round_to(c.v_max * rng.uniform(0.75, 0.92), 10.0);
    c.unit_prices = unit_prices(c.port, c.release, c.deadline, rng.uniform(0.86, 0.96));
    inst.contracts.push_back(std::move(c));
  }

  const int n_small = static_cast<int>(std::ceil(p.small_fraction * p.n_sell - 1e-9));
  for (int i = 0; i < p.n_sell; ++i) {
    Contract c;
    c.id = "S" + std::to_string(i);
    c.kind = ContractKind::sell;
    c.port = static_cast<std::size_t>(rng.integer(n_export, p.n_ports - 1));
    c.release = rng.integer(10, p.horizon_days - 5);
    c.deadline = std::min(p.horizon_days - 1, c.release + draw_window(rng) - 1);
    double factor;
    if (i < n_small) {
      c.v_min = rng.chance(0.25) ? 0.0 : round_to(rng.uniform(0.01, 0.15) * max_cap, 10.0);
      c.v_max = round_to(c.v_min + rng.uniform(0.03, 0.12) * max_cap, 10.0);
      factor = rng.uniform(1.08, 1.30);
    } else {
      c.v_max = round_to(rng.uniform(0.60, 0.95) * max_cap, 10.0);
      c.v_min = round_to(std::max(0.26 * max_cap, c.v_max * rng.uniform(0.6, 0.95)), 10.0);
      if (c.v_min >= c.v_max) c.v_min = c.v_max - 10.0;
      factor = rng.uniform(0.98, 1.12);
    }
    c.unit_prices = unit_prices(c.port, c.release, c.deadline, factor);
    inst.contracts.push_back(std::move(c));
  }

  check_invariants(inst);
  return inst;
}

double flexible_share(const Instance& inst) {
  if (inst.contracts.empty()) return 0.0;
  std::size_t n = 0;
  for (const auto& c : inst.contracts) n += is_flexible(inst, c) ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(inst.contracts.size());
}

Instance restrict_flexibility(const Instance& inst, double keep_fraction, std::uint64_t seed) {
  keep_fraction = std::clamp(keep_fraction, 0.0, 1.0);
  const double max_cap = inst.max_capacity();

  std::vector<std::size_t> flexible;
  for (std::size_t i = 0; i < inst.contracts.size(); ++i)
    if (is_flexible(inst, inst.contracts[i])) flexible.push_back(i);
  std::mt19937_64 eng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t i = flexible.size(); i > 1; --i) std::swap(flexible[i - 1], flexible[eng() % i]);

  // Pinning a flexible contract removes it when its v_max is still small.
  auto dropped_when_pinned = [&](std::size_t idx) {
    const Contract& c = inst.contracts[idx];
    return c.is_sell() && c.v_max < 0.25 * max_cap;
  };
  // Suffix counts of contracts removed if ranks >= k are pinned.
  std::vector<std::size_t> removed(flexible.size() + 1, 0);
  for (std::size_t k = flexible.size(); k-- > 0;)
    removed[k] = removed[k + 1] + (dropped_when_pinned(flexible[k]) ? 1 : 0);

  const std::size_t n = inst.contracts.size();
  std::size_t best_k = 0;
  double best_err = 2.0;
  for (std::size_t k = 0; k <= flexible.size(); ++k) {
    std::size_t total = n - removed[k];
    double share = total == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(total);
    double err = std::abs(share - keep_fraction);
    if (err < best_err - 1e-12) {
      best_err = err;
      best_k = k;
    }
  }

  std::vector<char> pinned(n, 0);
  for (std::size_t k = best_k; k < flexible.size(); ++k) pinned[flexible[k]] = 1;

  Instance out = inst;
  out.contracts.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (!pinned[i]) {
      out.contracts.push_back(inst.contracts[i]);
      continue;
    }
    if (dropped_when_pinned(i)) continue;
    Contract c = inst.contracts[i];
    c.v_min = c.v_max;
    out.contracts.push_back(std::move(c));
  }
  return out;
}

}  // namespace lngopt
