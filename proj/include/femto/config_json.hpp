#pragma once

// JSON form of NetworkConfig.
//
//   {
//     "R_c": 500, "R": 50,                       meters
//     "lambda_per_km2": 4, "mu_per_km2": 4,      or "lambda", "mu" in units/m^2
//     "nu_per_km2": 80,                          or "nu": density in units/m^2, or
//     "nu": [{"radius": 25, "density": 1e-4}, {"radius": 50, "density": 5e-5}],
//     "P_dbm": -60, "Q_dbm": -54,                or "P", "Q" in mW
//     "rho": 3.98,                               or "rho_db"
//     "gamma": 3, "T": 0.1,                      or "T_db"
//     "A": 1                                     accepted, never used
//   }
//
// Missing keys keep the value of the base configuration. A constant nu
// follows R; a step profile must end at R.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "femto/model.hpp"

namespace femto {

/// Malformed configuration document: bad JSON, unknown key, wrong type.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

NetworkConfig config_from_json(const nlohmann::json& doc, const NetworkConfig& base = reference_config());
NetworkConfig load_config(const std::string& path, const NetworkConfig& base = reference_config());
nlohmann::json config_to_json(const NetworkConfig& cfg);

/// Parameter names accepted by set_parameter, same units as the JSON keys.
const std::vector<std::string>& sweep_parameters();

/// Sets one parameter by its JSON key. Changing R rescales the break radii
/// of the nu profile with it.
void set_parameter(NetworkConfig& cfg, const std::string& name, double value);

}  // namespace femto
