#include "purcell/device_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace purcell {

using nlohmann::json;

namespace {

const std::map<std::string, double>& unit_table() {
  static const std::map<std::string, double> units = {
      // frequency
      {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9},
      // time
      {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12},
      // capacitance
      {"F", 1.0}, {"pF", 1e-12}, {"fF", 1e-15},
      // inductance
      {"H", 1.0}, {"nH", 1e-9}, {"pH", 1e-12},
      // current
      {"A", 1.0}, {"mA", 1e-3}, {"uA", 1e-6}, {"nA", 1e-9},
      // per-unit-length
      {"H/m", 1.0}, {"nH/m", 1e-9}, {"F/m", 1.0}, {"pF/m", 1e-12}, {"nF/m", 1e-9},
  };
  return units;
}

double quantity_from_json(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_quantity(v.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  throw ConfigError(where + ": expected number or quantity string");
}

double req(const json& obj, const std::string& key, const std::string& id) {
  if (!obj.contains(key)) throw ConfigError(id + ": missing required field '" + key + "'");
  return quantity_from_json(obj.at(key), id + "." + key);
}

double opt(const json& obj, const std::string& key, const std::string& id, double fallback) {
  if (!obj.contains(key)) return fallback;
  return quantity_from_json(obj.at(key), id + "." + key);
}

std::string req_id(const json& obj, const std::string& kind, std::size_t index) {
  if (!obj.contains("id"))
    throw ConfigError(kind + "[" + std::to_string(index) + "]: missing required field 'id'");
  return obj.at("id").get<std::string>();
}

void check_positive(double v, const std::string& id, const std::string& field) {
  if (!(v > 0) || !std::isfinite(v))
    throw ConfigError(id + ": field '" + field + "' must be strictly positive, got " +
                      std::to_string(v));
}

} // namespace

double parse_quantity(const std::string& text) {
  std::size_t pos = 0;
  double value;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse quantity '" + text + "'");
  }
  std::string unit = text.substr(pos);
  const auto strip = [](std::string s) {
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), [](unsigned char c) { return !std::isspace(c); }));
    s.erase(std::find_if(s.rbegin(), s.rend(), [](unsigned char c) { return !std::isspace(c); }).base(), s.end());
    return s;
  };
  unit = strip(unit);
  if (unit.empty()) return value;
  const auto& units = unit_table();
  auto it = units.find(unit);
  if (it == units.end()) throw ConfigError("unknown unit '" + unit + "' in '" + text + "'");
  return value * it->second;
}

bool DeviceConfig::has_element(const std::string& id) const {
  const auto match = [&](const auto& v) {
    return std::any_of(v.begin(), v.end(), [&](const auto& e) { return e.id == id; });
  };
  return match(qubits) || match(couplers) || match(resonators) || match(filters);
}

namespace {
template <typename T>
const T& find_element(const std::vector<T>& v, const std::string& id, const char* kind) {
  for (const auto& e : v)
    if (e.id == id) return e;
  throw ConfigError(std::string(kind) + " '" + id + "' not found");
}
} // namespace

const QubitParams& DeviceConfig::qubit(const std::string& id) const {
  return find_element(qubits, id, "qubit");
}
const CouplerParams& DeviceConfig::coupler(const std::string& id) const {
  return find_element(couplers, id, "coupler");
}
const ResonatorParams& DeviceConfig::resonator(const std::string& id) const {
  return find_element(resonators, id, "resonator");
}
const FilterParams& DeviceConfig::filter(const std::string& id) const {
  return find_element(filters, id, "filter");
}

DeviceConfig parse_device_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }

  DeviceConfig cfg;
  std::size_t i = 0;
  for (const auto& q : root.value("qubits", json::array())) {
    QubitParams p;
    p.id = req_id(q, "qubits", i++);
    p.freq_idle = req(q, "freq_idle", p.id);
    // tables quote anharmonicity magnitudes; transmons are negative
    p.anharmonicity = -std::abs(req(q, "anharmonicity", p.id));
    p.t1 = req(q, "T1", p.id);
    p.t2 = req(q, "T2", p.id);
    p.ec = opt(q, "EC", p.id, std::abs(p.anharmonicity));
    cfg.qubits.push_back(p);
  }
  i = 0;
  for (const auto& c : root.value("couplers", json::array())) {
    CouplerParams p;
    p.id = req_id(c, "couplers", i++);
    p.freq_max = req(c, "freq_max", p.id);
    p.ec = req(c, "EC", p.id);
    p.ej = req(c, "EJ", p.id);
    p.asymmetry_d = req(c, "d", p.id);
    p.flux_map_k = req(c, "flux_map_k", p.id);
    p.flux_map_b = req(c, "flux_map_b", p.id);
    p.anharmonicity = -std::abs(opt(c, "anharmonicity", p.id, p.ec));
    cfg.couplers.push_back(p);
  }
  i = 0;
  for (const auto& r : root.value("resonators", json::array())) {
    ResonatorParams p;
    p.id = req_id(r, "resonators", i++);
    p.freq_bare = req(r, "freq_bare", p.id);
    p.c_r = req(r, "C_r", p.id);
    p.c_qr = req(r, "C_qr", p.id);
    p.c_rf = req(r, "C_rf", p.id);
    if (r.contains("g_qr")) p.g_qr = quantity_from_json(r.at("g_qr"), p.id + ".g_qr");
    if (r.contains("g_rf")) p.g_rf = quantity_from_json(r.at("g_rf"), p.id + ".g_rf");
    cfg.resonators.push_back(p);
  }
  i = 0;
  for (const auto& f : root.value("filters", json::array())) {
    FilterParams p;
    p.id = req_id(f, "filters", i++);
    p.omega0_bare = req(f, "omega0_bare", p.id);
    p.ic1 = req(f, "Ic1", p.id);
    p.ic2 = req(f, "Ic2", p.id);
    p.lu = req(f, "Lu", p.id);
    p.cu = req(f, "Cu", p.id);
    p.c_in = req(f, "C_in", p.id);
    p.c_out = req(f, "C_out", p.id);
    p.anharmonicity_f = req(f, "anharmonicity_f", p.id);
    p.kappa_f = req(f, "kappa_f", p.id);
    cfg.filters.push_back(p);
  }
  for (const auto& e : root.value("topology", json::array())) {
    CouplingEdge edge;
    edge.a = e.at(0).get<std::string>();
    edge.b = e.at(1).get<std::string>();
    edge.value = quantity_from_json(e.at(2), "topology[" + edge.a + "," + edge.b + "]");
    edge.is_capacitance = e.size() > 3 && e.at(3).get<std::string>() == "capacitance";
    cfg.topology.push_back(edge);
  }

  validate(cfg);
  return cfg;
}

DeviceConfig load_device_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config file not found: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_device_config(ss.str());
}

void validate(const DeviceConfig& cfg) {
  for (const auto& q : cfg.qubits) {
    check_positive(q.freq_idle, q.id, "freq_idle");
    check_positive(q.t1, q.id, "T1");
    check_positive(q.t2, q.id, "T2");
    if (!(q.anharmonicity < 0))
      throw ConfigError(q.id + ": field 'anharmonicity' must be negative for transmons");
    if (!(std::abs(q.anharmonicity) < q.freq_idle))
      throw ConfigError(q.id + ": |anharmonicity| must be below freq_idle");
  }
  for (const auto& c : cfg.couplers) {
    check_positive(c.freq_max, c.id, "freq_max");
    check_positive(c.ec, c.id, "EC");
    check_positive(c.ej, c.id, "EJ");
    if (!(c.asymmetry_d >= 0 && c.asymmetry_d < 1))
      throw ConfigError(c.id + ": field 'd' must satisfy 0 <= d < 1");
    if (!(c.ej > c.ec)) throw ConfigError(c.id + ": EJ must exceed EC");
  }
  for (const auto& r : cfg.resonators) {
    check_positive(r.freq_bare, r.id, "freq_bare");
    check_positive(r.c_r, r.id, "C_r");
    check_positive(r.c_qr, r.id, "C_qr");
    check_positive(r.c_rf, r.id, "C_rf");
  }
  for (const auto& f : cfg.filters) {
    check_positive(f.omega0_bare, f.id, "omega0_bare");
    if (f.ic1 < 0) throw ConfigError(f.id + ": field 'Ic1' must be nonnegative");
    if (f.ic2 < 0) throw ConfigError(f.id + ": field 'Ic2' must be nonnegative");
    if (!(f.ic1 + f.ic2 > 0)) throw ConfigError(f.id + ": Ic1 + Ic2 must be positive");
    check_positive(f.lu, f.id, "Lu");
    check_positive(f.cu, f.id, "Cu");
    check_positive(f.c_in, f.id, "C_in");
    check_positive(f.c_out, f.id, "C_out");
    check_positive(f.kappa_f, f.id, "kappa_f");
  }
  for (const auto& e : cfg.topology) {
    if (!cfg.has_element(e.a))
      throw ConfigError("topology edge references unknown element '" + e.a + "'");
    if (!cfg.has_element(e.b))
      throw ConfigError("topology edge references unknown element '" + e.b + "'");
  }
}

namespace {
json qubit_to_json(const QubitParams& p) {
  return json{{"id", p.id},           {"freq_idle", p.freq_idle},
              {"anharmonicity", p.anharmonicity}, {"T1", p.t1},
              {"T2", p.t2},           {"EC", p.ec}};
}
} // namespace

std::string serialize_device_config(const DeviceConfig& cfg) {
  json root;
  root["qubits"] = json::array();
  for (const auto& q : cfg.qubits) root["qubits"].push_back(qubit_to_json(q));
  root["couplers"] = json::array();
  for (const auto& c : cfg.couplers) {
    root["couplers"].push_back(json{{"id", c.id},
                                    {"freq_max", c.freq_max},
                                    {"EC", c.ec},
                                    {"EJ", c.ej},
                                    {"d", c.asymmetry_d},
                                    {"flux_map_k", c.flux_map_k},
                                    {"flux_map_b", c.flux_map_b},
                                    {"anharmonicity", c.anharmonicity}});
  }
  root["resonators"] = json::array();
  for (const auto& r : cfg.resonators) {
    json j{{"id", r.id}, {"freq_bare", r.freq_bare}, {"C_r", r.c_r},
           {"C_qr", r.c_qr}, {"C_rf", r.c_rf}};
    if (r.g_qr) j["g_qr"] = *r.g_qr;
    if (r.g_rf) j["g_rf"] = *r.g_rf;
    root["resonators"].push_back(j);
  }
  root["filters"] = json::array();
  for (const auto& f : cfg.filters) {
    root["filters"].push_back(json{{"id", f.id},
                                   {"omega0_bare", f.omega0_bare},
                                   {"Ic1", f.ic1},
                                   {"Ic2", f.ic2},
                                   {"Lu", f.lu},
                                   {"Cu", f.cu},
                                   {"C_in", f.c_in},
                                   {"C_out", f.c_out},
                                   {"anharmonicity_f", f.anharmonicity_f},
                                   {"kappa_f", f.kappa_f}});
  }
  root["topology"] = json::array();
  for (const auto& e : cfg.topology) {
    json j = json::array({e.a, e.b, e.value});
    if (e.is_capacitance) j.push_back("capacitance");
    root["topology"].push_back(j);
  }
  return root.dump(2);
}

} // namespace purcell
