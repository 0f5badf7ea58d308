// Parametric synthetic instances shaped like the artificial benchmark sets,
// plus the flexibility restriction used for the flexibility sweep.
#pragma once

#include <cstdint>

#include "lngopt/instance.hpp"

namespace lngopt {

struct GeneratorParams {
  int n_vessels = 4;
  int n_buy = 52;
  int n_sell = 200;
  double small_fraction = 0.5;
  int horizon_days = 885;
  int n_ports = 12;
  // 0 picks a default that keeps trip counts tractable.
  int max_trip_days = 0;
};

/// Deterministic in (seed, params). Throws std::invalid_argument on bad params.
Instance generate_instance(std::uint64_t seed, const GeneratorParams& params);

/// Lowers the share of flexible contracts to about keep_fraction by pinning
/// v_min to v_max on a seeded subset and dropping contracts that are still
/// small afterwards. Kept sets are nested across fractions for one seed.
Instance restrict_flexibility(const Instance& instance, double keep_fraction, std::uint64_t seed);

/// Share of flexible contracts in [0, 1]; 0 for an instance without contracts.
double flexible_share(const Instance& instance);

}  // namespace lngopt
