#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace purcell {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All stored values are in base SI units: Hz, F, H, A, s.
// Frequencies are ordinary frequencies (f = omega/2pi).

struct QubitParams {
  std::string id;
  double freq_idle = 0;      // Hz
  double anharmonicity = 0;  // Hz, signed (negative for transmons)
  double t1 = 0;             // s
  double t2 = 0;             // s
  double ec = 0;             // Hz, charging energy E_C/h
};

struct CouplerParams {
  std::string id;
  double freq_max = 0;  // Hz, sweet-spot frequency
  double ec = 0;        // Hz
  double ej = 0;        // Hz
  double asymmetry_d = 0;
  double flux_map_k = 0;  // rad per Z amplitude unit
  double flux_map_b = 0;  // rad
  double anharmonicity = 0;  // Hz, signed
};

struct FilterParams {
  std::string id;
  double omega0_bare = 0;      // Hz, lambda/2 frequency without the SQUID
  double ic1 = 0;              // A
  double ic2 = 0;              // A
  double lu = 0;               // H/m
  double cu = 0;               // F/m
  double c_in = 0;             // F
  double c_out = 0;            // F
  double anharmonicity_f = 0;  // Hz
  double kappa_f = 0;          // Hz
};

struct ResonatorParams {
  std::string id;
  double freq_bare = 0;  // Hz
  double c_r = 0;        // F
  double c_qr = 0;       // F
  double c_rf = 0;       // F
  std::optional<double> g_qr;  // Hz, overrides capacitive derivation
  std::optional<double> g_rf;  // Hz
};

struct CouplingEdge {
  std::string a;
  std::string b;
  double value = 0;  // Hz coupling strength or F mutual capacitance
  bool is_capacitance = false;
};

struct DeviceConfig {
  std::vector<QubitParams> qubits;
  std::vector<CouplerParams> couplers;
  std::vector<ResonatorParams> resonators;
  std::vector<FilterParams> filters;
  std::vector<CouplingEdge> topology;

  bool has_element(const std::string& id) const;
  const QubitParams& qubit(const std::string& id) const;
  const CouplerParams& coupler(const std::string& id) const;
  const ResonatorParams& resonator(const std::string& id) const;
  const FilterParams& filter(const std::string& id) const;
};

// Accepts raw numbers (base units) or strings with a unit suffix
// ("4.83 GHz", "35.6 us", "0.085 uA", "15.7 fF", "464 nH/m").
double parse_quantity(const std::string& text);

DeviceConfig load_device_config(const std::string& path);
DeviceConfig parse_device_config(const std::string& json_text);
std::string serialize_device_config(const DeviceConfig& cfg);
void validate(const DeviceConfig& cfg);

} // namespace purcell
