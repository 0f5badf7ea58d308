#include "lngopt/schedule.hpp"

#include <json.hpp>
#include <sstream>

#include "lngopt/instance_io.hpp"

namespace lngopt {

using nlohmann::json;

Schedule Schedule::empty(const Instance& instance, std::string source) {
  Schedule s;
  s.source = std::move(source);
  for (std::size_t k = 0; k < instance.vessels.size(); ++k) {
    VesselSchedule vs;
    vs.vessel = k;
    vs.start_volume = instance.vessels[k].initial_volume;
    s.vessels.push_back(std::move(vs));
  }
  return s;
}

std::size_t Schedule::num_calls() const {
  std::size_t n = 0;
  for (const auto& v : vessels) n += v.calls.size();
  return n;
}

namespace {

const char* kind_name(CallKind k) {
  switch (k) {
    case CallKind::start: return "start";
    case CallKind::contract: return "contract";
    case CallKind::end: return "end";
  }
  return "?";
}

CallKind kind_from(const std::string& s, const std::string& where) {
  if (s == "start") return CallKind::start;
  if (s == "contract") return CallKind::contract;
  if (s == "end") return CallKind::end;
  throw ParseError(where, "unknown call kind '" + s + "'");
}

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ParseError(where, std::string("bad field '") + key + "': " + e.what());
  }
}

template <typename T>
T optional_field(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

}  // namespace

std::string schedule_to_json(const Schedule& s, const Instance& inst) {
  json doc;
  doc["source"] = s.source;
  doc["penalty"] = s.penalty;
  doc["vessels"] = json::array();
  for (const auto& vs : s.vessels) {
    json v;
    v["vessel"] = inst.vessels.at(vs.vessel).id;
    v["start_volume"] = vs.start_volume;
    v["calls"] = json::array();
    for (const auto& c : vs.calls) {
      json jc;
      jc["kind"] = kind_name(c.kind);
      if (c.kind == CallKind::contract) jc["contract"] = inst.contracts.at(c.contract).id;
      jc["port"] = inst.ports.at(c.port).id;
      jc["day"] = c.day;
      jc["volume"] = c.volume;
      jc["free_purchase"] = c.free_purchase;
      jc["over_delivery"] = c.over_delivery;
      v["calls"].push_back(jc);
    }
    v["legs"] = json::array();
    for (const auto& l : vs.legs) {
      v["legs"].push_back({{"speed", l.speed},
                           {"fuel_mode", to_string(l.fuel_mode)},
                           {"sail_hours", l.sail_hours},
                           {"idle_hours", l.idle_hours},
                           {"lng_burn", l.lng_burn},
                           {"fuel_cost", l.fuel_cost}});
    }
    v["onboard"] = vs.onboard;
    doc["vessels"].push_back(v);
  }
  return doc.dump(2) + "\n";
}

Schedule schedule_from_json(const std::string& text, const Instance& inst) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("schedule:byte " + std::to_string(e.byte), e.what());
  }
  Schedule s;
  s.source = optional_field<std::string>(doc, "source", "", "schedule");
  s.penalty = optional_field<double>(doc, "penalty", 0.0, "schedule");
  const auto vessels = field<json>(doc, "vessels", "schedule");
  for (std::size_t i = 0; i < vessels.size(); ++i) {
    const std::string where = "schedule.vessels[" + std::to_string(i) + "]";
    const json& jv = vessels[i];
    VesselSchedule vs;
    auto vid = field<std::string>(jv, "vessel", where);
    auto k = inst.find_vessel(vid);
    if (!k) throw ParseError(where, "unknown vessel '" + vid + "'");
    vs.vessel = *k;
    vs.start_volume = optional_field<double>(jv, "start_volume", inst.vessels[*k].initial_volume, where);
    const auto calls = optional_field<json>(jv, "calls", json::array(), where);
    for (std::size_t c = 0; c < calls.size(); ++c) {
      const std::string cw = where + ".calls[" + std::to_string(c) + "]";
      PortCall pc;
      pc.kind = kind_from(field<std::string>(calls[c], "kind", cw), cw);
      if (pc.kind == CallKind::contract) {
        auto cid = field<std::string>(calls[c], "contract", cw);
        auto ci = inst.find_contract(cid);
        if (!ci) throw ParseError(cw, "unknown contract '" + cid + "'");
        pc.contract = *ci;
      }
      auto pid = field<std::string>(calls[c], "port", cw);
      auto pi = inst.find_port(pid);
      if (!pi) throw ParseError(cw, "unknown port '" + pid + "'");
      pc.port = *pi;
      pc.day = field<int>(calls[c], "day", cw);
      pc.volume = optional_field<double>(calls[c], "volume", 0.0, cw);
      pc.free_purchase = optional_field<double>(calls[c], "free_purchase", 0.0, cw);
      pc.over_delivery = optional_field<double>(calls[c], "over_delivery", 0.0, cw);
      vs.calls.push_back(pc);
    }
    const auto legs = optional_field<json>(jv, "legs", json::array(), where);
    for (std::size_t l = 0; l < legs.size(); ++l) {
      const std::string lw = where + ".legs[" + std::to_string(l) + "]";
      Leg leg;
      leg.speed = field<double>(legs[l], "speed", lw);
      try {
        leg.fuel_mode = fuel_mode_from_string(field<std::string>(legs[l], "fuel_mode", lw));
      } catch (const std::exception& e) {
        throw ParseError(lw, e.what());
      }
      leg.sail_hours = field<double>(legs[l], "sail_hours", lw);
      leg.idle_hours = field<double>(legs[l], "idle_hours", lw);
      leg.lng_burn = field<double>(legs[l], "lng_burn", lw);
      leg.fuel_cost = field<double>(legs[l], "fuel_cost", lw);
      vs.legs.push_back(leg);
    }
    vs.onboard = optional_field<std::vector<double>>(jv, "onboard", {}, where);
    s.vessels.push_back(std::move(vs));
  }
  return s;
}

std::string schedule_daily_csv(const Schedule& s, const Instance& inst) {
  std::ostringstream out;
  out << "vessel,day,location,onboard\n";
  for (const auto& vs : s.vessels) {
    if (vs.calls.empty()) continue;
    for (std::size_t i = 0; i < vs.calls.size(); ++i) {
      const auto& c = vs.calls[i];
      const double after = i < vs.onboard.size() ? vs.onboard[i] : 0.0;
      out << inst.vessels[vs.vessel].id << ',' << c.day << ',' << inst.ports[c.port].id << ','
          << format_double(after) << '\n';
      if (i + 1 >= vs.calls.size() || i >= vs.legs.size()) continue;
      const int next = vs.calls[i + 1].day;
      const double span = std::max(1, next - c.day);
      for (int d = c.day + 1; d < next; ++d) {
        const double v = after - vs.legs[i].lng_burn * (d - c.day) / span;
        out << inst.vessels[vs.vessel].id << ',' << d << ",at_sea," << format_double(v) << '\n';
      }
    }
  }
  return out.str();
}

}  // namespace lngopt
