#include "femto/config_json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace femto {

namespace {

using nlohmann::json;

double number(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError("config: \"" + key + "\" must be a number");
  return v.get<double>();
}

IntensityProfile<double> profile_from_json(const json& v, double radius) {
  if (v.is_number()) return IntensityProfile<double>::constant(v.get<double>(), radius);
  if (!v.is_array() || v.empty()) throw ConfigError("config: \"nu\" must be a number or a non-empty array of steps");
  std::vector<IntensityProfile<double>::Step> steps;
  for (const json& s : v) {
    if (!s.is_object() || !s.contains("radius") || !s.contains("density"))
      throw ConfigError("config: each \"nu\" step needs \"radius\" and \"density\"");
    steps.push_back({number(s, "radius"), number(s, "density")});
  }
  return IntensityProfile<double>(std::move(steps));
}

bool is_constant(const IntensityProfile<double>& p) { return p.steps().size() == 1; }

}  // namespace

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{
      "R_c", "R",  "lambda", "lambda_per_km2", "mu",     "mu_per_km2", "nu", "nu_per_km2",
      "P",   "P_dbm", "Q",   "Q_dbm",          "rho",    "rho_db",     "gamma", "T", "T_db", "A"};
  return names;
}

void set_parameter(NetworkConfig& cfg, const std::string& name, double value) {
  if (!std::isfinite(value)) throw ConfigError("parameter " + name + ": value must be finite");
  auto set_nu = [&](double density) {
    if (!is_constant(cfg.femto_ue_profile))
      throw ConfigError("parameter " + name + ": only a constant nu profile can be set by value");
    cfg.femto_ue_profile = IntensityProfile<double>::constant(density, cfg.femto_radius);
  };
  if (name == "R_c") {
    cfg.cell_radius = value;
  } else if (name == "R") {
    if (!(value > 0.0)) throw DomainError("femtocell radius R must be positive");
    std::vector<IntensityProfile<double>::Step> steps;
    for (const auto& s : cfg.femto_ue_profile.steps())
      steps.push_back({s.break_radius * value / cfg.femto_radius, s.density});
    cfg.femto_ue_profile = IntensityProfile<double>(std::move(steps));
    cfg.femto_radius = value;
  } else if (name == "lambda") {
    cfg.macro_ue_density = value;
  } else if (name == "lambda_per_km2") {
    cfg.macro_ue_density = value * kPerKm2;
  } else if (name == "mu") {
    cfg.femto_bs_density = value;
  } else if (name == "mu_per_km2") {
    cfg.femto_bs_density = value * kPerKm2;
  } else if (name == "nu") {
    set_nu(value);
  } else if (name == "nu_per_km2") {
    set_nu(value * kPerKm2);
  } else if (name == "P") {
    cfg.macro_power = value;
  } else if (name == "P_dbm") {
    cfg.macro_power = dbm_to_mw(value);
  } else if (name == "Q") {
    cfg.femto_power = value;
  } else if (name == "Q_dbm") {
    cfg.femto_power = dbm_to_mw(value);
  } else if (name == "rho") {
    cfg.rho = value;
  } else if (name == "rho_db") {
    cfg.rho = db_to_linear(value);
  } else if (name == "gamma") {
    cfg.pathloss_exponent = value;
  } else if (name == "T") {
    cfg.sir_threshold = value;
  } else if (name == "T_db") {
    cfg.sir_threshold = db_to_linear(value);
  } else if (name == "A") {
    cfg.pathloss_constant = value;
  } else {
    throw ConfigError("unknown parameter \"" + name + "\"");
  }
}

NetworkConfig config_from_json(const json& doc, const NetworkConfig& base) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  NetworkConfig cfg = base;
  const auto& known = sweep_parameters();
  for (const auto& [key, value] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("config: unknown key \"" + key + "\"");
  auto both = [&](const char* a, const char* b) {
    if (doc.contains(a) && doc.contains(b))
      throw ConfigError(std::string("config: give either \"") + a + "\" or \"" + b + "\"");
  };
  both("lambda", "lambda_per_km2");
  both("mu", "mu_per_km2");
  both("nu", "nu_per_km2");
  both("P", "P_dbm");
  both("Q", "Q_dbm");
  both("rho", "rho_db");
  both("T", "T_db");

  if (doc.contains("R_c")) cfg.cell_radius = number(doc, "R_c");
  if (doc.contains("R")) {
    const double r = number(doc, "R");
    if (is_constant(cfg.femto_ue_profile))
      cfg.femto_ue_profile = IntensityProfile<double>::constant(cfg.femto_ue_profile.steps().front().density, r);
    cfg.femto_radius = r;
  }
  if (doc.contains("nu")) {
    const json& v = doc.at("nu");
    try {
      cfg.femto_ue_profile = profile_from_json(v, cfg.femto_radius);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("config: \"nu\": ") + e.what());
    }
  }
  if (doc.contains("nu_per_km2"))
    cfg.femto_ue_profile = IntensityProfile<double>::constant(number(doc, "nu_per_km2") * kPerKm2, cfg.femto_radius);
  for (const char* key : {"lambda", "lambda_per_km2", "mu", "mu_per_km2", "P", "P_dbm", "Q", "Q_dbm", "rho",
                          "rho_db", "gamma", "T", "T_db", "A"})
    if (doc.contains(key)) set_parameter(cfg, key, number(doc, key));
  return cfg;
}

NetworkConfig load_config(const std::string& path, const NetworkConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(doc, base);
}

json config_to_json(const NetworkConfig& cfg) {
  json nu = json::array();
  for (const auto& s : cfg.femto_ue_profile.steps()) nu.push_back({{"radius", s.break_radius}, {"density", s.density}});
  return {{"R_c", cfg.cell_radius},
          {"R", cfg.femto_radius},
          {"lambda", cfg.macro_ue_density},
          {"mu", cfg.femto_bs_density},
          {"nu", nu},
          {"P", cfg.macro_power},
          {"Q", cfg.femto_power},
          {"rho", cfg.rho},
          {"gamma", cfg.pathloss_exponent},
          {"T", cfg.sir_threshold},
          {"A", cfg.pathloss_constant}};
}

}  // namespace femto
