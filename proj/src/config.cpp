#include "lngopt/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace lngopt {

namespace {

constexpr Approach kAll[] = {Approach::bigpairs, Approach::single_lns, Approach::multistart_lns, Approach::node_mip,
                             Approach::node_decomposed};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

template <typename T>
T number(const std::string& key, const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not a valid number '" + v + "'");
  return out;
}

bool boolean(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::ostringstream out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out << ',';
    if constexpr (std::is_same_v<T, Approach>)
      out << to_string(items[i]);
    else
      out << items[i];
  }
  return out.str();
}

}  // namespace

const char* to_string(Approach a) {
  switch (a) {
    case Approach::bigpairs: return "bigpairs";
    case Approach::single_lns: return "single_lns";
    case Approach::multistart_lns: return "multistart_lns";
    case Approach::node_mip: return "node_mip";
    case Approach::node_decomposed: return "node_decomposed";
  }
  return "?";
}

Approach approach_from_string(const std::string& text) {
  for (Approach a : kAll)
    if (text == to_string(a)) return a;
  throw ConfigError("unknown approach '" + text + "'");
}

void RunConfig::check() const {
  if (approaches.empty()) throw ConfigError("approach: at least one approach is required");
  if (grid_o == 0 || grid_r == 0) throw ConfigError("grid: both axes need at least one point");
  if (budget == 0) throw ConfigError("budget must be positive");
  if (wallclock_seconds < 0.0) throw ConfigError("wallclock must be non-negative");
  if (workers == 0) throw ConfigError("workers must be positive");
  if (rank == 0) throw ConfigError("rank must be positive");
  if (omega < 0.0) throw ConfigError("omega must be non-negative");
  if (fill_fraction < 0.0 || fill_fraction > 1.0) throw ConfigError("fill_fraction must lie in [0, 1]");
  if (node_limit == 0) throw ConfigError("node_limit must be positive");
  if (relative_gap < 0.0) throw ConfigError("relative_gap must be non-negative");
  if (window_days <= 0) throw ConfigError("window_days must be positive");
  if (keep_fractions.empty()) throw ConfigError("keep_fractions: at least one fraction is required");
  for (double f : keep_fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("keep_fractions must lie in (0, 1]");
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "instance") c.instance = v;
  else if (key == "approach") {
    c.approaches.clear();
    for (const auto& a : split_list(v)) c.approaches.push_back(approach_from_string(a));
  } else if (key == "output_dir") c.output_dir = v;
  else if (key == "grid_o") c.grid_o = number<std::size_t>(key, v);
  else if (key == "grid_r") c.grid_r = number<std::size_t>(key, v);
  else if (key == "budget") c.budget = number<std::size_t>(key, v);
  else if (key == "wallclock") c.wallclock_seconds = number<double>(key, v);
  else if (key == "seed") c.seed = number<std::uint64_t>(key, v);
  else if (key == "workers") c.workers = number<std::size_t>(key, v);
  else if (key == "rank") c.rank = number<std::size_t>(key, v);
  else if (key == "penalized_objective") c.penalized_objective = boolean(key, v);
  else if (key == "omega") c.omega = number<double>(key, v);
  else if (key == "fill_fraction") c.fill_fraction = number<double>(key, v);
  else if (key == "laden_upper_is_capacity") c.laden_upper_is_capacity = boolean(key, v);
  else if (key == "node_limit") c.node_limit = number<std::size_t>(key, v);
  else if (key == "relative_gap") c.relative_gap = number<double>(key, v);
  else if (key == "node_steps") c.node_steps = number<std::size_t>(key, v);
  else if (key == "window_days") c.window_days = number<int>(key, v);
  else if (key == "node_max_binaries") c.node_max_binaries = number<std::size_t>(key, v);
  else if (key == "keep_fractions") {
    c.keep_fractions.clear();
    for (const auto& f : split_list(v)) c.keep_fractions.push_back(number<double>(key, f));
  } else if (key == "bench_seed") c.bench_seed = number<std::uint64_t>(key, v);
  else throw ConfigError("unknown key '" + key + "'");
}

RunConfig parse_config(const std::string& text, RunConfig c) {
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    try {
      set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  c.check();
  return c;
}

std::string format_config(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "instance = " << c.instance << "\n"
      << "approach = " << join(c.approaches) << "\n"
      << "output_dir = " << c.output_dir << "\n"
      << "grid_o = " << c.grid_o << "\n"
      << "grid_r = " << c.grid_r << "\n"
      << "budget = " << c.budget << "\n"
      << "wallclock = " << c.wallclock_seconds << "\n"
      << "seed = " << c.seed << "\n"
      << "workers = " << c.workers << "\n"
      << "rank = " << c.rank << "\n"
      << "penalized_objective = " << (c.penalized_objective ? "true" : "false") << "\n"
      << "omega = " << c.omega << "\n"
      << "fill_fraction = " << c.fill_fraction << "\n"
      << "laden_upper_is_capacity = " << (c.laden_upper_is_capacity ? "true" : "false") << "\n"
      << "node_limit = " << c.node_limit << "\n"
      << "relative_gap = " << c.relative_gap << "\n"
      << "node_steps = " << c.node_steps << "\n"
      << "window_days = " << c.window_days << "\n"
      << "node_max_binaries = " << c.node_max_binaries << "\n"
      << "keep_fractions = " << join(c.keep_fractions) << "\n"
      << "bench_seed = " << c.bench_seed << "\n";
  return out.str();
}

}  // namespace lngopt
