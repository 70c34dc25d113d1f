#pragma once

#include <string>
#include <vector>

#include "purcell/reset.hpp"

namespace purcell {

// Built-in reset scenario library.
//
//  paper-square     square QC (4.5 ns) + square CF (70 ns), literal published
//                   amplitudes and durations
//  paper-adiabatic  adiabatic QC (30 ns, g = 0.605 MHz, f_center = 4.86 GHz)
//                   + 170 ns CF ramp, literal published pulse coefficients
//  model-adiabatic  adiabatic QC re-paced for this model (g matched to the
//                   physical qubit-coupler coupling, 60 ns) + 170 ns CF ramp,
//                   with the 1.56 ns control-line bandwidth kernel applied
std::vector<std::string> scenario_names();
ResetScenario scenario_by_name(const std::string& name);

ResetScenario parse_scenario_json(const std::string& json_text);
std::string serialize_scenario(const ResetScenario& sc);

} // namespace purcell
