#include "lngopt/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "csv.hpp"
#include "json.hpp"

namespace lngopt {

using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

namespace {

constexpr const char* kConsumptionHeader =
    "Vessel name,Fuel mode,Is laden,\"Speed, knots\",\"Consumption, m3/hour\","
    "\"Boil-off, m3/hour\",\"Fuel cost, money/hour\"";

const char* table_mode_name(FuelMode mode) {
  switch (mode) {
    case FuelMode::lng_only: return "LNG only";
    case FuelMode::fuel_only: return "Fuel only";
    case FuelMode::combined: return "Combined";
  }
  return "?";
}

double parse_number(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(where, "expected a number, got '" + text + "'");
  return value;
}

int parse_int(const std::string& text, const std::string& where) {
  int value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(where, "expected an integer, got '" + text + "'");
  return value;
}

template <typename T>
T get_field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "." + key, "missing field");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where + "." + key, e.what());
  }
}

std::size_t port_index(const std::map<std::string, std::size_t>& ports, const std::string& id,
                       const std::string& where) {
  auto it = ports.find(id);
  if (it == ports.end()) throw InvariantError(where, "unknown port '" + id + "'");
  return it->second;
}

std::vector<csv::Row> data_rows(const std::string& text, const char* file, std::size_t columns) {
  auto rows = csv::parse(text);
  if (rows.empty()) throw ParseError(file, "missing header");
  rows.erase(rows.begin());
  for (const auto& r : rows)
    if (r.fields.size() != columns)
      throw ParseError(std::string(file) + ":" + std::to_string(r.line),
                       "expected " + std::to_string(columns) + " fields, got " +
                           std::to_string(r.fields.size()));
  return rows;
}

}  // namespace

Instance parse_bundle(const InstanceBundle& bundle) {
  json doc;
  try {
    doc = json::parse(bundle.instance_json);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(kInstanceFile) + "@" + std::to_string(e.byte), e.what());
  }
  if (!doc.is_object()) throw ParseError(kInstanceFile, "top level must be an object");

  Instance inst;
  inst.name = doc.value("name", std::string());
  inst.horizon_days = get_field<int>(doc, "horizon_days", kInstanceFile);
  inst.max_trip_days = doc.value("max_trip_days", 0);

  std::map<std::string, std::size_t> port_ids;
  const auto& ports = doc.at("ports");
  for (std::size_t i = 0; i < ports.size(); ++i) {
    const std::string where = std::string(kInstanceFile) + ":ports[" + std::to_string(i) + "]";
    Port p{get_field<std::string>(ports[i], "id", where), ports[i].value("name", std::string())};
    if (!port_ids.emplace(p.id, i).second) throw InvariantError("port " + p.id, "duplicate identifier");
    inst.ports.push_back(std::move(p));
  }

  const auto& vessels = doc.at("vessels");
  for (std::size_t i = 0; i < vessels.size(); ++i) {
    const auto& o = vessels[i];
    const std::string where = std::string(kInstanceFile) + ":vessels[" + std::to_string(i) + "]";
    Vessel v;
    v.id = get_field<std::string>(o, "id", where);
    v.capacity = get_field<double>(o, "capacity", where);
    v.fill_fraction = o.value("fill_fraction", 0.985);
    if (auto it = o.find("forbidden_zone"); it != o.end()) {
      if (!it->is_array() || it->size() != 2) throw ParseError(where + ".forbidden_zone", "expected [low, high]");
      v.forbidden_low = (*it)[0].get<double>();
      v.forbidden_high = (*it)[1].get<double>();
    }
    v.idle_boil_off = get_field<double>(o, "idle_boil_off", where);
    v.rent_start = get_field<int>(o, "rent_start", where);
    v.rent_end = get_field<int>(o, "rent_end", where);
    v.initial_port = port_index(port_ids, get_field<std::string>(o, "initial_port", where), "vessel " + v.id);
    v.final_port = port_index(port_ids, get_field<std::string>(o, "final_port", where), "vessel " + v.id);
    v.initial_volume = get_field<double>(o, "initial_volume", where);
    inst.vessels.push_back(std::move(v));
  }

  const auto& contracts = doc.at("contracts");
  for (std::size_t i = 0; i < contracts.size(); ++i) {
    const auto& o = contracts[i];
    const std::string where = std::string(kInstanceFile) + ":contracts[" + std::to_string(i) + "]";
    Contract c;
    c.id = get_field<std::string>(o, "id", where);
    try {
      c.kind = contract_kind_from_string(get_field<std::string>(o, "kind", where));
    } catch (const std::invalid_argument& e) {
      throw ParseError(where + ".kind", e.what());
    }
    c.port = port_index(port_ids, get_field<std::string>(o, "port", where), "contract " + c.id);
    c.release = get_field<int>(o, "release", where);
    c.deadline = get_field<int>(o, "deadline", where);
    c.v_min = get_field<double>(o, "v_min", where);
    c.v_max = get_field<double>(o, "v_max", where);
    c.unit_prices = get_field<std::vector<double>>(o, "unit_prices", where);
    inst.contracts.push_back(std::move(c));
  }

  std::map<std::string, std::size_t> vessel_ids;
  for (std::size_t i = 0; i < inst.vessels.size(); ++i) vessel_ids.emplace(inst.vessels[i].id, i);
  for (const auto& r : data_rows(bundle.consumption_csv, kConsumptionFile, 7)) {
    const std::string where = std::string(kConsumptionFile) + ":" + std::to_string(r.line);
    auto it = vessel_ids.find(r.fields[0]);
    if (it == vessel_ids.end()) throw InvariantError(where, "unknown vessel '" + r.fields[0] + "'");
    ConsumptionRow row;
    try {
      row.fuel_mode = fuel_mode_from_string(r.fields[1]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(where, e.what());
    }
    if (r.fields[2] != "Yes" && r.fields[2] != "No") throw ParseError(where, "Is laden must be Yes or No");
    row.laden = r.fields[2] == "Yes";
    row.speed = parse_number(r.fields[3], where);
    row.consumption = parse_number(r.fields[4], where);
    row.boil_off = parse_number(r.fields[5], where);
    row.fuel_cost_rate = parse_number(r.fields[6], where);
    inst.vessels[it->second].consumption.push_back(row);
  }

  inst.distances = DistanceMatrix(inst.ports.size());
  for (const auto& r : data_rows(bundle.distances_csv, kDistancesFile, 3)) {
    const std::string where = std::string(kDistancesFile) + ":" + std::to_string(r.line);
    std::size_t a = port_index(port_ids, r.fields[0], where);
    std::size_t b = port_index(port_ids, r.fields[1], where);
    inst.distances.set(a, b, parse_number(r.fields[2], where));
  }

  if (inst.horizon_days <= 0) throw InvariantError("instance", "horizon_days must be positive");
  inst.free_prices = PriceSeries(inst.ports.size(), inst.horizon_days);
  for (const auto& r : data_rows(bundle.prices_csv, kPricesFile, 3)) {
    const std::string where = std::string(kPricesFile) + ":" + std::to_string(r.line);
    std::size_t p = port_index(port_ids, r.fields[0], where);
    int day = parse_int(r.fields[1], where);
    if (day < 0 || day >= inst.horizon_days) throw InvariantError(where, "day outside horizon");
    inst.free_prices.set(p, day, parse_number(r.fields[2], where));
  }

  check_invariants(inst);
  return inst;
}

InstanceBundle to_bundle(const Instance& inst) {
  json doc;
  doc["name"] = inst.name;
  doc["horizon_days"] = inst.horizon_days;
  doc["max_trip_days"] = inst.max_trip_days;
  doc["ports"] = json::array();
  for (const auto& p : inst.ports) doc["ports"].push_back({{"id", p.id}, {"name", p.name}});
  doc["vessels"] = json::array();
  for (const auto& v : inst.vessels) {
    doc["vessels"].push_back({{"id", v.id},
                              {"capacity", v.capacity},
                              {"fill_fraction", v.fill_fraction},
                              {"forbidden_zone", {v.forbidden_low, v.forbidden_high}},
                              {"idle_boil_off", v.idle_boil_off},
                              {"rent_start", v.rent_start},
                              {"rent_end", v.rent_end},
                              {"initial_port", inst.ports[v.initial_port].id},
                              {"final_port", inst.ports[v.final_port].id},
                              {"initial_volume", v.initial_volume}});
  }
  doc["contracts"] = json::array();
  for (const auto& c : inst.contracts) {
    doc["contracts"].push_back({{"id", c.id},
                                {"kind", to_string(c.kind)},
                                {"port", inst.ports[c.port].id},
                                {"release", c.release},
                                {"deadline", c.deadline},
                                {"v_min", c.v_min},
                                {"v_max", c.v_max},
                                {"unit_prices", c.unit_prices}});
  }

  InstanceBundle out;
  out.instance_json = doc.dump(2) + "\n";

  std::string cons = std::string(kConsumptionHeader) + "\n";
  for (const auto& v : inst.vessels)
    for (const auto& r : v.consumption) {
      cons += csv::quote(v.id) + "," + table_mode_name(r.fuel_mode) + "," + (r.laden ? "Yes" : "No") +
              "," + format_double(r.speed) + "," + format_double(r.consumption) + "," +
              format_double(r.boil_off) + "," + format_double(r.fuel_cost_rate) + "\n";
    }
  out.consumption_csv = std::move(cons);

  std::string dist = "port_a,port_b,nm\n";
  for (std::size_t a = 0; a < inst.ports.size(); ++a)
    for (std::size_t b = a + 1; b < inst.ports.size(); ++b)
      dist += csv::quote(inst.ports[a].id) + "," + csv::quote(inst.ports[b].id) + "," +
              format_double(inst.distances(a, b)) + "\n";
  out.distances_csv = std::move(dist);

  std::string prices = "port,day,price\n";
  for (std::size_t p = 0; p < inst.ports.size(); ++p)
    for (int d = 0; d < inst.horizon_days; ++d)
      prices += csv::quote(inst.ports[p].id) + "," + std::to_string(d) + "," +
                format_double(inst.free_prices(p, d)) + "\n";
  out.prices_csv = std::move(prices);
  return out;
}

Instance load_instance(const std::filesystem::path& directory) {
  InstanceBundle b;
  b.instance_json = read_text_file(directory / kInstanceFile);
  b.consumption_csv = read_text_file(directory / kConsumptionFile);
  b.distances_csv = read_text_file(directory / kDistancesFile);
  b.prices_csv = read_text_file(directory / kPricesFile);
  return parse_bundle(b);
}

void save_instance(const Instance& instance, const std::filesystem::path& directory) {
  auto b = to_bundle(instance);
  std::filesystem::create_directories(directory);
  write_text_file(directory / kInstanceFile, b.instance_json);
  write_text_file(directory / kConsumptionFile, b.consumption_csv);
  write_text_file(directory / kDistancesFile, b.distances_csv);
  write_text_file(directory / kPricesFile, b.prices_csv);
}

}  // namespace lngopt
