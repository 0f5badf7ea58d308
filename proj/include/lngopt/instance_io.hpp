// Instance bundle I/O.
//
// A bundle is a directory holding four files:
//   instance.json     ports, vessels, contracts, horizon
//   consumption.csv   vessel consumption tables
//   distances.csv     port,port,nm triples
//   prices.csv        port,day,price free LNG price series
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "lngopt/instance.hpp"

namespace lngopt {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string location, const std::string& what)
      : std::runtime_error(location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

struct InstanceBundle {
  std::string instance_json;
  std::string consumption_csv;
  std::string distances_csv;
  std::string prices_csv;

  bool operator==(const InstanceBundle&) const = default;
};

inline constexpr const char* kInstanceFile = "instance.json";
inline constexpr const char* kConsumptionFile = "consumption.csv";
inline constexpr const char* kDistancesFile = "distances.csv";
inline constexpr const char* kPricesFile = "prices.csv";

/// Parses and checks a bundle. Throws ParseError or InvariantError.
Instance parse_bundle(const InstanceBundle& bundle);
/// Deterministic serialization; parse_bundle(to_bundle(x)) == x.
InstanceBundle to_bundle(const Instance& instance);

Instance load_instance(const std::filesystem::path& directory);
void save_instance(const Instance& instance, const std::filesystem::path& directory);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace lngopt
