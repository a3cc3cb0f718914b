#include "femto/model.hpp"

#include <numbers>
#include <sstream>

namespace femto {

void NetworkConfig::validate() const {
  auto positive_finite = [](double v) { return v > 0.0 && std::isfinite(v); };
  auto non_negative_finite = [](double v) { return v >= 0.0 && std::isfinite(v); };
  if (!positive_finite(cell_radius)) throw DomainError("cell radius R_c must be positive");
  if (!positive_finite(femto_radius)) throw DomainError("femtocell radius R must be positive");
  if (!(femto_radius < cell_radius)) throw DomainError("femtocell radius R must be smaller than R_c");
  if (!(pathloss_exponent > 2.0) || !std::isfinite(pathloss_exponent))
    throw DomainError("pathloss exponent gamma must exceed 2");
  if (!non_negative_finite(macro_ue_density)) throw DomainError("macro UE density lambda must be >= 0");
  if (!non_negative_finite(femto_bs_density)) throw DomainError("femto BS density mu must be >= 0");
  if (!positive_finite(macro_power)) throw DomainError("macro target power P must be positive");
  if (!positive_finite(femto_power)) throw DomainError("femto target power Q must be positive");
  if (!positive_finite(rho)) throw DomainError("power enhancement rho must be positive");
  if (!positive_finite(sir_threshold)) throw DomainError("SIR threshold T must be positive");
  if (std::abs(femto_ue_profile.outer_radius() - femto_radius) > 1e-12 * femto_radius)
    throw DomainError("femto UE intensity profile must end at the femtocell radius R");
}

std::vector<std::string> NetworkConfig::warnings() const {
  std::vector<std::string> out;
  if (femto_radius >= 0.5 * cell_radius) {
    std::ostringstream os;
    os << "femtocell radius is " << femto_radius / cell_radius
       << " of the macrocell radius; the model assumes R << R_c";
    out.push_back(os.str());
  }
  return out;
}

NormalizedConfig normalize(const NetworkConfig& cfg) {
  const double L = cfg.cell_radius;
  const double P = cfg.macro_power;
  NormalizedConfig n{cfg, L, P};
  NetworkConfig& c = n.config;
  c.cell_radius = 1.0;
  c.femto_radius = cfg.femto_radius / L;
  c.macro_ue_density = cfg.macro_ue_density * L * L;
  c.femto_bs_density = cfg.femto_bs_density * L * L;
  c.femto_ue_profile = cfg.femto_ue_profile.scaled(L);
  c.macro_power = 1.0;
  c.femto_power = cfg.femto_power / P;
  return n;
}

NetworkConfig denormalize(const NormalizedConfig& n) {
  const double L = n.length_scale;
  const double P = n.power_scale;
  NetworkConfig c = n.config;
  c.cell_radius = n.config.cell_radius * L;
  c.femto_radius = n.config.femto_radius * L;
  c.macro_ue_density = n.config.macro_ue_density / (L * L);
  c.femto_bs_density = n.config.femto_bs_density / (L * L);
  c.femto_ue_profile = n.config.femto_ue_profile.scaled(1.0 / L);
  c.macro_power = n.config.macro_power * P;
  c.femto_power = n.config.femto_power * P;
  return c;
}

DerivedQuantities derived_quantities(const NetworkConfig& cfg) {
  return {cfg.femto_ue_profile.mean_count(),
          std::numbers::pi * cfg.femto_radius * cfg.femto_radius * cfg.macro_ue_density};
}

double interference_term(const Point& victim, const Point& tx, const Point& served_at, double target_power,
                         double fading, double gamma) {
  const double to_victim = (tx - victim).norm();
  if (to_victim == 0.0) throw DomainError("interference_term: transmitter coincides with the victim");
  if (fading < 0.0) throw DomainError("interference_term: fading must be non-negative");
  const double to_server = (tx - served_at).norm();
  return target_power * std::pow(to_server / to_victim, gamma) * fading;
}

NetworkConfig reference_config() {
  NetworkConfig c;
  c.cell_radius = 500.0;
  c.femto_radius = 50.0;
  c.macro_ue_density = 4.0 * kPerKm2;
  c.femto_bs_density = 4.0 * kPerKm2;
  c.femto_ue_profile = IntensityProfile<double>::constant(80.0 * kPerKm2, 50.0);
  c.macro_power = dbm_to_mw(-60.0);
  c.femto_power = dbm_to_mw(-54.0);
  c.rho = c.femto_power / c.macro_power;
  c.pathloss_exponent = 3.0;
  c.sir_threshold = 0.1;
  return c;
}

NetworkConfig threshold_study_config(double femto_radius_m) {
  NetworkConfig c = reference_config();
  c.femto_radius = femto_radius_m;
  c.femto_ue_profile = IntensityProfile<double>::constant(20.0 * kPerKm2, femto_radius_m);
  return c;
}

}  // namespace femto
