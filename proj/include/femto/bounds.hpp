#pragma once

// Closed-form sufficient conditions for open vs closed access, the constants
// they need, and root searches for the break-even power enhancement.
//
// Functions taking a NetworkConfig accept physical units and normalize
// internally; the rest take normalized arguments (R_c = 1, P = 1).

#include <optional>
#include <string>

#include "femto/analytic.hpp"

namespace femto {

/// 1/8 + 1/(4(gamma+2)) + 1/((gamma+2)(gamma-2)).
double shape_factor(double gamma);

struct VBounds {
  double v_min = 0.0;
  double v_max = 0.0;
};

/// Sandwich for the plane integral V of the enhanced-power kernel over all
/// femtocell positions: V_max = 4 pi^2 R^4 (T rho)^(2/gamma) B(gamma), V_min = V_max / 2.
VBounds v_bounds(double t_eff_rho, double gamma, double femto_radius);

/// C_u = integral over R^2 of phi(T |x - BS(x)|^gamma / |x - v|^gamma) on the
/// normalized grid. The macro level uses v = 0; the femto level uses x_B.
/// Results are cached per (T, gamma, v).
QuadResult compute_Cu(double threshold, double gamma, const Point& victim = Point::Zero(),
                      const QuadratureSpec& spec = {});

enum class Certificate { open_better, closed_better, inconclusive, degenerate };
const char* to_string(Certificate c);

struct SufficientConditions {
  double open_better = 0.0;    ///< > 0 certifies outage(open) < outage(closed)
  double closed_better = 0.0;  ///< > 0 certifies outage(closed) < outage(open)
  Certificate verdict = Certificate::inconclusive;
};

SufficientConditions macro_sufficient_conditions(const NetworkConfig& cfg);

struct RhoBounds {
  double rho_min = 0.0;
  double rho_max = 0.0;
};

RhoBounds rho_star_bounds(const NetworkConfig& cfg);

enum class RootStatus { found, degenerate, no_sign_change };
const char* to_string(RootStatus s);

struct RootResult {
  RootStatus status = RootStatus::no_sign_change;
  double rho = 0.0;  ///< root estimate when found
  double lo = 0.0;   ///< final bracket
  double hi = 0.0;
  int evaluations = 0;
  std::string note;
};

/// rho at which macro outage(open) = outage(closed), by bisection on log rho
/// inside [rho_min / 10, 10 rho_max]. Degenerate when mu = 0 or lambda = 0.
RootResult rho_star_exact(const NetworkConfig& cfg, const QuadratureSpec& spec = {}, double rel_tol = 1e-4);

struct RBounds {
  double r_min = 0.0;
  double r_max = 0.0;
};

/// Bounds on the in-cell kernel integral over B(x_B, R) (normalized units).
/// The lower bound assumes the disk lies inside H(0).
RBounds r_min_max(const Point& x_b, double t_prime, double gamma, double femto_radius);

struct FemtoConditions {
  double k1 = 0.0;  ///< > 0 certifies open better at x_B
  double k2 = 0.0;  ///< > 0 certifies closed better at x_B
  Certificate verdict = Certificate::inconclusive;
};

FemtoConditions femto_sufficient_conditions(const Point& x_b, const NetworkConfig& cfg);

struct OneSidedRoot {
  double rho = 0.0;
  bool found = false;  ///< false: no sign change, rho is the bracket edge
};

struct Rho2Bounds {
  OneSidedRoot rho_min;  ///< K1 = 0
  OneSidedRoot rho_max;  ///< K2 = 0
};

Rho2Bounds rho_star2_bounds(const Point& x_b, const NetworkConfig& cfg);

/// rho at which femto outage(open) = outage(closed) at x_B. Degenerate when lambda = 0.
RootResult rho_star2_exact(const Point& x_b, const NetworkConfig& cfg, const QuadratureSpec& spec = {},
                           double rel_tol = 1e-4);

struct MacroBoundsReport {
  VBounds v;
  double c_u = 0.0;
  SufficientConditions conditions;
  RhoBounds rho_star;
  std::optional<RootResult> exact;
};

struct FemtoBoundsReport {
  Point x_b = Point::Zero();  ///< physical units
  VBounds v;
  double c_u_prime = 0.0;
  RBounds r;
  bool r_min_valid = true;  ///< B(x_B, R) inside H(0)
  FemtoConditions conditions;
  Rho2Bounds rho_star2;
  std::optional<RootResult> exact;
};

MacroBoundsReport macro_bounds_report(const NetworkConfig& cfg, bool with_exact, const QuadratureSpec& spec = {});
FemtoBoundsReport femto_bounds_report(const Point& x_b, const NetworkConfig& cfg, bool with_exact,
                                      const QuadratureSpec& spec = {});

}  // namespace femto
