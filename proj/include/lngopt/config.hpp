// Run configuration: a key = value text file, one setting per line, '#'
// starts a comment. Keys are listed in README.md.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lngopt {

enum class Approach { bigpairs, single_lns, multistart_lns, node_mip, node_decomposed };

const char* to_string(Approach approach);
Approach approach_from_string(const std::string& text);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string instance;  // instance bundle directory
  std::vector<Approach> approaches{Approach::bigpairs, Approach::single_lns, Approach::multistart_lns};
  std::string output_dir;  // empty = no files written

  // tt-opt
  std::size_t grid_o = 16, grid_r = 16;
  std::size_t budget = 32;         // evaluations
  double wallclock_seconds = 0.0;  // > 0 turns the budget into a time limit
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::size_t rank = 2;
  // Score tt-opt evaluations by the penalized insertion objective instead of
  // the headline profit.
  bool penalized_objective = false;

  // models
  double omega = 0.0;          // 0 = 10 x max unit sell price
  double fill_fraction = 0.0;  // > 0 overrides every vessel's fill fraction
  bool laden_upper_is_capacity = false;
  std::size_t node_limit = 2000;
  double relative_gap = 1e-4;
  std::size_t node_steps = 0;
  int window_days = 182;
  std::size_t node_max_binaries = 60000;

  // bench
  std::vector<double> keep_fractions{0.25, 0.5, 0.75, 1.0};
  std::uint64_t bench_seed = 1;

  /// Throws ConfigError when a field is out of range.
  void check() const;
};

/// Unknown keys and malformed values throw ConfigError naming the line.
RunConfig parse_config(const std::string& text, RunConfig base = {});
/// Applies one `key = value` setting.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string format_config(const RunConfig& config);

}  // namespace lngopt
