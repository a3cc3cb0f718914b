#pragma once

// Laplace transforms of the aggregate uplink interference and the outage
// probabilities derived from them, for both access modes at the macrocell
// BS and at a femtocell BS.
//
// Public entry points take physical configurations; every evaluation runs
// on the normalized configuration (R_c = 1, P = 1). Points are in the same
// length unit as the configuration, s in inverse power units.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "femto/geometry.hpp"
#include "femto/model.hpp"
#include "femto/quadrature.hpp"

namespace femto {

struct QuadratureSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  /// Radius (in units of R_c) of the region where the femto-field remainder
  /// is integrated numerically; beyond it an analytic bound is added to the
  /// error. Empty selects 4.
  std::optional<double> truncation_radius;
  /// Gauss-Legendre order per direction for hexagon averages.
  int hex_average_order = 4;

  void validate() const;
  double remainder_radius() const { return truncation_radius.value_or(4.0); }
};

enum class Level { macro, femto };

struct LaplaceContext {
  NetworkConfig config;
  double s = 0.0;
  Level level = Level::macro;
  Access access = Access::open;
  Point x_b = Point::Zero();  ///< femtocell BS position, femto level only
};

/// Exponent decomposition: value = exp(-(macro + field + in_cell)).
struct LaplaceBreakdown {
  double macro = 0.0;    ///< lambda * plane kernel integral (L_0 or L_0')
  double field = 0.0;    ///< mu * int (1 - J) dx0, or mu * int (1 - W) dx0 when closed
  double in_cell = 0.0;  ///< femto level: -log of the typical-femtocell factors
};

struct LaplaceValue {
  double value = 1.0;
  double error = 0.0;  ///< absolute error estimate on value
  LaplaceBreakdown terms;
};

struct OutageValue {
  double probability = 0.0;
  double quad_error = 0.0;
};

// ---------------------------------------------------------------------------
// Kernel integrals on the normalized grid (R_c = 1). phi(X) = X / (X + 1).

/// Integral of |y|^k over the hexagon H(0) with R_c = 1.
double hex_power_moment(double k);

/// Plane integral of phi(b / |z|^gamma): kappa(gamma) * b^(2/gamma).
double kernel_kappa(double gamma);

/// K(b, v) = integral over R^2 of phi(b |x - BS(x)|^gamma / |x - v|^gamma).
/// Cells near v are integrated adaptively; farther cells use a multipole
/// expansion summed over the lattice and a continuum tail.
QuadResult plane_kernel_integral(double b, const Point& victim, double gamma, const QuadratureSpec& spec = {});

/// Integral over the disk B(center, radius) of phi(b |x - BS(x)|^gamma / |x - v|^gamma).
QuadResult disk_kernel_integral(double b, const Point& center, double radius, const Point& victim, double gamma,
                                Tolerance tol);

/// Integral over B(0, R) of phi(b |y|^gamma / |y + x0|^gamma) w(|y|) dy for
/// |x0| = offset, with w the step profile (its outer radius is R).
QuadResult local_kernel_integral(double b, double offset, const IntensityProfile<double>& weight, double gamma,
                                 Tolerance tol);

// ---------------------------------------------------------------------------
// Laplace functionals. `victim` is the receiving BS: the origin for the
// macro level, x_B for the femto level.

LaplaceValue eval_L0(double s, const NetworkConfig& cfg, const QuadratureSpec& spec = {},
                     const Point& victim = Point::Zero());
LaplaceValue eval_W(double s, const Point& x0, const NetworkConfig& cfg, const QuadratureSpec& spec = {},
                    const Point& victim = Point::Zero());
LaplaceValue eval_V(double s, const Point& x0, const NetworkConfig& cfg, const QuadratureSpec& spec = {},
                    const Point& victim = Point::Zero());
LaplaceValue eval_U(double s, const Point& x0, const NetworkConfig& cfg, const QuadratureSpec& spec = {},
                    const Point& victim = Point::Zero());

LaplaceValue laplace(const LaplaceContext& ctx, const QuadratureSpec& spec = {});
LaplaceValue macro_laplace(double s, const NetworkConfig& cfg, Access access, const QuadratureSpec& spec = {});
LaplaceValue femto_laplace(double s, const Point& x_b, const NetworkConfig& cfg, Access access,
                           const QuadratureSpec& spec = {});

OutageValue macro_outage(const NetworkConfig& cfg, Access access, const QuadratureSpec& spec = {});
OutageValue femto_outage(const Point& x_b, const NetworkConfig& cfg, Access access,
                         const QuadratureSpec& spec = {});
/// Outage averaged over x_B uniform in H(0). Uses the D6 symmetry of the
/// model, so only a twelfth of the hexagon is sampled.
OutageValue femto_outage_avg(const NetworkConfig& cfg, Access access, const QuadratureSpec& spec = {});

/// Mean of f over the hexagon H(0) by a product Gauss-Legendre rule of
/// `order` in polar coordinates on each of the six triangles (or on one
/// twelfth of the hexagon when `d6_symmetric`). The error estimate is the
/// difference to the rule of order - 1.
QuadResult average_over_hexagon(const std::function<double(const Point&)>& f, const HexGrid<double>& grid,
                                int order, bool d6_symmetric = false);

/// Open and closed outage at one level for a configuration whose rho varies.
/// Everything that does not depend on rho is computed once.
class AccessComparator {
 public:
  AccessComparator(const NetworkConfig& cfg, Level level, const Point& x_b = Point::Zero(),
                   const QuadratureSpec& spec = {});
  ~AccessComparator();
  AccessComparator(AccessComparator&&) noexcept;
  AccessComparator& operator=(AccessComparator&&) noexcept;

  OutageValue outage(Access access, double rho) const;
  /// outage(open) - outage(closed) at rho, with the combined error.
  OutageValue difference(double rho) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace femto
