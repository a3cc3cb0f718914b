#pragma once

// Network parameter set, power control and normalization shared by the
// analytic, bounds and simulation paths.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "femto/geometry.hpp"

namespace femto {

enum class Access { open, closed };

inline const char* to_string(Access a) { return a == Access::open ? "open" : "closed"; }

/// All physical and statistical parameters of the two-tier network. Any
/// consistent unit system works; the CLI uses meters, units/m^2 and mW.
struct NetworkConfig {
  double cell_radius = 500.0;          ///< R_c, macrocell hexagon radius
  double femto_radius = 50.0;          ///< R, femtocell radius
  double macro_ue_density = 0.0;       ///< lambda
  double femto_bs_density = 0.0;       ///< mu
  IntensityProfile<double> femto_ue_profile = IntensityProfile<double>::constant(0.0, 50.0);  ///< nu
  double macro_power = 1e-6;           ///< P, targeted macro received power
  double femto_power = 1e-6;           ///< Q, targeted femto received power
  double rho = 1.0;                    ///< P' = rho * P for open-access UEs
  double pathloss_exponent = 3.0;      ///< gamma
  double sir_threshold = 0.1;          ///< T
  /// Propagation constant A. Power control inverts it exactly, so it cancels
  /// from every SIR expression and is never used numerically.
  double pathloss_constant = 1.0;

  HexGrid<double> grid() const { return HexGrid<double>(cell_radius); }

  /// Throws DomainError on gamma <= 2, R >= R_c, negative densities,
  /// non-positive powers/thresholds, or a profile whose radius differs from R.
  void validate() const;

  /// Non-fatal remarks, e.g. a femtocell radius that is not small against R_c.
  std::vector<std::string> warnings() const;
};

struct NormalizedConfig {
  NetworkConfig config;       ///< R_c = 1, P = 1
  double length_scale = 1.0;  ///< original R_c
  double power_scale = 1.0;   ///< original P
};

/// Lengths divided by R_c (densities multiplied by R_c^2), powers divided by P.
NormalizedConfig normalize(const NetworkConfig& cfg);
NetworkConfig denormalize(const NormalizedConfig& n);

struct DerivedQuantities {
  double nu_bar = 0.0;      ///< mean local UEs per femtocell
  double lambda_bar = 0.0;  ///< mean open-access UEs per femtocell, pi R^2 lambda
};

DerivedQuantities derived_quantities(const NetworkConfig& cfg);

/// Received interference at `victim` from a UE at `tx` power-controlled
/// towards `served_at` with target `target_power`:
/// target_power * |tx - served_at|^gamma * h / |tx - victim|^gamma.
double interference_term(const Point& victim, const Point& tx, const Point& served_at, double target_power,
                         double fading, double gamma);

/// Rayleigh power fading: Exp(1).
template <typename Rng>
double draw_fading(Rng& rng) {
  std::exponential_distribution<double> exp1(1.0);
  return exp1(rng);
}

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Parameters of the numerical study: R_c = 500 m, R = 50 m, gamma = 3,
/// T = 0.1, P = -60 dBm, Q = P' = -54 dBm, nu = 80 units/km^2,
/// lambda = mu = 4 units/km^2.
NetworkConfig reference_config();

/// Parameters of the threshold study: as reference_config() but
/// nu = 20 units/km^2 inside the femtocell radius `femto_radius_m`.
NetworkConfig threshold_study_config(double femto_radius_m = 50.0);

inline constexpr double kPerKm2 = 1e-6;  ///< units/km^2 expressed in units/m^2

}  // namespace femto
