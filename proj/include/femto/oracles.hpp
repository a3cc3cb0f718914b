#pragma once

// Reference computations used to check the analytic and bounds engines:
// exhaustive searches and fixed composite Gauss-Legendre rules that share no
// code path with the adaptive integrators. Slow but simple.

#include <functional>

#include "femto/geometry.hpp"
#include "femto/model.hpp"

namespace femto::oracle {

/// Nearest lattice point by exhaustive search over |a|, |b| <= range around
/// the index of p's rounded skew coordinates (range 3 at the origin).
Point nearest_bs_exhaustive(const Point& p, double cell_radius, int range = 3);

/// Integral of f over the disk B(center, radius) in polar coordinates about
/// the center, `panels_r` x `panels_t` panels of a `order`-point rule.
/// Angular panels start at `theta0`.
double disk_integral(const std::function<double(const Point&)>& f, const Point& center, double radius,
                     int panels_r, int panels_t, int order, double theta0 = 0.0);

/// The plane integral over x0 of the disk integral over B(x0, R) of
/// phi(t |x - x0|^gamma / |x|^gamma), by a triple product rule with an
/// analytic first-order tail.
double v_plane_bruteforce(double t_eff_rho, double gamma, double femto_radius);

/// C_u on the normalized grid: cells near the victim by Gauss-Legendre on
/// triangles fanned from the victim or the cell centre, farther cells as
/// point masses, and a continuum tail.
double cu_cellwise(double threshold, double gamma, const Point& victim = Point::Zero());

/// Exponents of the W, V and U functionals (value = exp(-exponent)) by
/// disk_integral on a fine fixed grid. Physical units, as the analytic API.
double w_exponent(double s, const Point& x0, const NetworkConfig& cfg, const Point& victim = Point::Zero());
double v_exponent(double s, const Point& x0, const NetworkConfig& cfg, const Point& victim = Point::Zero());
double u_exponent(double s, const Point& x0, const NetworkConfig& cfg, const Point& victim = Point::Zero());

/// The in-cell kernel integral over B(x_B, R) bracketed by R_min and R_max
/// (normalized units), by disk_integral.
double r_in_cell(const Point& x_b, double t_prime, double gamma, double femto_radius);

/// R_min and R_max for gamma = 4 from the antiderivative
/// int B r / (r^4 + B) dr = sqrt(B) / 2 * atan(r^2 / sqrt(B)).
struct RPair {
  double r_min = 0.0;
  double r_max = 0.0;
};
RPair r_min_max_gamma4(const Point& x_b, double t_prime, double femto_radius);

/// Mean of f over the hexagon H(0) by a dense product rule on its six triangles.
double hexagon_mean(const std::function<double(const Point&)>& f, double cell_radius, int order = 24);

}  // namespace femto::oracle
