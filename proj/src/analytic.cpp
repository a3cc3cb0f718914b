#include "femto/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "femto/errors.hpp"

namespace femto {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);
const double kApothem = kSqrt3 / 2.0;
const double kHexArea = 1.5 * kSqrt3;

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

// phi(b d^gamma / dist^gamma) with the degenerate limits of the kernel.
inline double kernel(double b, double d, double dist, double gamma) {
  if (dist == 0.0) return d == 0.0 ? b / (b + 1.0) : 1.0;
  const double x = b * std::pow(d / dist, gamma);
  return x / (x + 1.0);
}

Point lattice(long a, long b) { return {1.5 * double(a), kSqrt3 / 2.0 * double(a) + kSqrt3 * double(b)}; }

template <typename F>
void for_each_lattice_point(const Point& v, double radius, F&& f) {
  const long amin = static_cast<long>(std::floor((v.x() - radius) / 1.5));
  const long amax = static_cast<long>(std::ceil((v.x() + radius) / 1.5));
  for (long a = amin; a <= amax; ++a) {
    const double y0 = kSqrt3 / 2.0 * double(a);
    const long bmin = static_cast<long>(std::floor((v.y() - radius - y0) / kSqrt3));
    const long bmax = static_cast<long>(std::ceil((v.y() + radius - y0) / kSqrt3));
    for (long b = bmin; b <= bmax; ++b) {
      const Point c = lattice(a, b);
      const double r = (c - v).norm();
      if (r < radius) f(c, r);
    }
  }
}

Point hex_vertex(const Point& c, int k) {
  const double t = kPi / 3.0 * double(k % 6);
  return c + Point(std::cos(t), std::sin(t));
}

bool in_closed_hexagon(const Point& p, const Point& c) {
  const Point d = p - c;
  for (int k = 0; k < 6; ++k) {
    const double t = kPi / 6.0 + kPi / 3.0 * k;
    if (d.x() * std::cos(t) + d.y() * std::sin(t) > kApothem * (1.0 + 1e-13)) return false;
  }
  return true;
}

// Integral of f over triangle (A, B, C) in polar coordinates about A.
template <typename F>
QuadResult triangle_polar(F& f, const Point& A, Point B, Point C, Tolerance tol) {
  if (cross(B - A, C - A) < 0.0) std::swap(B, C);
  const Point eb = B - A, ec = C - A;
  const double span = std::atan2(cross(eb, ec), eb.dot(ec));
  if (!(span > 1e-14) || eb.norm() < 1e-15 || ec.norm() < 1e-15) return {};
  const double t0 = std::atan2(eb.y(), eb.x());
  const Point bc = C - B;
  const double num = cross(B - A, bc);
  double inner_err = 0.0;
  long evals = 0;
  bool conv = true;
  const Tolerance inner_tol{tol.abs / span, tol.rel, tol.max_intervals};
  auto outer = [&](double t) {
    const Point e(std::cos(t), std::sin(t));
    const double rmax = num / cross(e, bc);
    auto inner = [&](double r) { return f(Point(A + r * e)) * r; };
    const QuadResult q = integrate(inner, 0.0, rmax, inner_tol);
    inner_err = std::max(inner_err, q.error);
    evals += q.evaluations;
    conv = conv && q.converged;
    return q.value;
  };
  QuadResult out = integrate(outer, t0, t0 + span, tol);
  out.error += inner_err * span;
  out.evaluations += evals;
  out.converged = out.converged && conv;
  return out;
}

// Integral over the cell H(c) of phi(b |x - c|^gamma / |x - v|^gamma).
QuadResult cell_integral(const Point& c, const Point& v, double b, double gamma, Tolerance tol) {
  auto f = [&](const Point& x) { return kernel(b, (x - c).norm(), (x - v).norm(), gamma); };
  QuadResult total;
  const bool split = (v - c).norm() > 1e-14 && in_closed_hexagon(v, c);
  int host = -1;
  if (split) {
    double ang = std::atan2(v.y() - c.y(), v.x() - c.x());
    if (ang < 0) ang += 2 * kPi;
    host = std::min(5, static_cast<int>(ang / (kPi / 3.0)));
  }
  for (int k = 0; k < 6; ++k) {
    const Point p1 = hex_vertex(c, k), p2 = hex_vertex(c, k + 1);
    if (k == host) {
      total += triangle_polar(f, v, c, p1, tol);
      total += triangle_polar(f, v, p1, p2, tol);
      total += triangle_polar(f, v, p2, c, tol);
    } else {
      total += triangle_polar(f, c, p1, p2, tol);
    }
  }
  return total;
}

// ((p/2)_n / n!)^2, the coefficients of the angular mean of |1 + t e^{i theta}|^{-p}.
double ring_coefficient(double p, int n) {
  double c = 1.0;
  for (int i = 0; i < n; ++i) c *= (p / 2.0 + i) / (i + 1.0);
  return c * c;
}

struct PowerTerm {
  double coeff;
  double power;
};

double smooth_step(double t) {
  auto psi = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return psi(t) / (psi(t) + psi(1.0 - t));
}

std::vector<double> radial_breaks(double R, double outer) {
  std::vector<double> br{0.0, 0.5 * R, R, 1.5 * R, 2.0 * R, 3.0 * R};
  double r = 3.0 * R;
  while (r * 2.0 < outer) {
    r *= 2.0;
    br.push_back(r);
  }
  br.push_back(outer);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

// Mean of |1 + t e^{i theta}|^{-gamma} over theta, minus 1, for t < 1.
double ring_excess(double gamma, double t) {
  double sum = 0.0, tn = 1.0;
  for (int n = 1; n < 200; ++n) {
    tn *= t * t;
    const double term = ring_coefficient(gamma, n) * tn;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// Integral of |y|^k over the disk of radius R.
double disk_moment(double R, double k) { return 2.0 * kPi * std::pow(R, k + 2.0) / (k + 2.0); }

struct FarTail {
  double value = 0.0;
  double error = 0.0;
};

// Integral over |x0| > outer of 1 - exp(-a) - a for a field exponent with
// |a - A / r^gamma| <= D / r^gamma + S2 / (r - R)^(2 gamma). The value is
// the -a^2 / 2 term of A / r^gamma; the error covers the deviation of a and
// the cubic remainder.
FarTail far_tail(double A, double D, double S2, double R, double outer, double gamma) {
  FarTail t;
  if (A == 0.0 && D == 0.0 && S2 == 0.0) return t;
  const double shift = std::pow(outer / (outer - R), 2.0 * gamma);
  t.value = -kPi * A * A * std::pow(outer, 2.0 - 2.0 * gamma) / (2.0 * gamma - 2.0);
  auto f = [&](double u) {
    if (u == 0.0) return 0.0;
    const double r = outer / u;
    const double rg = std::pow(r, -gamma);
    const double dev = D * rg + S2 * shift * rg * rg;
    const double lead = std::abs(A) * rg;
    const double amax = lead + dev;
    const double h = 0.5 * (lead + amax) * dev + amax * amax * amax / 6.0 * std::exp(amax);
    return 2.0 * kPi * r * h * outer / (u * u);
  };
  const QuadResult q = integrate(f, 0.0, 1.0, Tolerance{1e-18, 1e-6, 200});
  t.error = q.value + q.error;
  return t;
}

// Kernel integrals that do not depend on lambda, mu, nu or rho: the plane
// integral, the disk integrals on the remainder nodes and the disk about the
// victim. Shared across configurations through a small cache.
struct FieldGeometry {
  QuadResult plane;
  KronrodNodes radial;
  KronrodNodes angular;
  double angular_factor = 1.0;
  std::vector<double> u_int;  // radial-major, size radial.x.size() * angular.x.size()
  double u_err = 0.0;
  QuadResult victim_disk;
};

using GeometryKey = std::tuple<double, double, double, double, double, double, bool, double, double>;

std::shared_ptr<const FieldGeometry> field_geometry(double R, double gamma, double b, const Point& victim,
                                                    double outer, bool symmetric, const QuadratureSpec& spec) {
  static std::mutex mu;
  static std::map<GeometryKey, std::shared_ptr<const FieldGeometry>> cache;
  const GeometryKey key{R, gamma, b, victim.x(), victim.y(), outer, symmetric, spec.rel_tol, spec.abs_tol};
  {
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto g = std::make_shared<FieldGeometry>();
  g->plane = plane_kernel_integral(b, victim, gamma, spec);
  const auto rb = radial_breaks(R, outer);
  g->radial = kronrod_nodes(rb);
  std::vector<double> tb;
  if (symmetric) {
    tb = {0.0, kPi / 6.0};
    g->angular_factor = 12.0;
  } else {
    for (int k = 0; k <= 8; ++k) tb.push_back(kPi / 4.0 * k);
  }
  g->angular = kronrod_nodes(tb);
  const Tolerance tol{1e-13, 1e-6, 200};
  g->u_int.resize(g->radial.x.size() * g->angular.x.size());
  for (std::size_t i = 0; i < g->radial.x.size(); ++i) {
    for (std::size_t j = 0; j < g->angular.x.size(); ++j) {
      const double r = g->radial.x[i], t = g->angular.x[j];
      const Point x0 = victim + r * Point(std::cos(t), std::sin(t));
      const QuadResult q = disk_kernel_integral(b, x0, R, victim, gamma, tol);
      g->u_int[i * g->angular.x.size() + j] = q.value;
      g->u_err = std::max(g->u_err, q.error);
    }
  }
  g->victim_disk =
      disk_kernel_integral(b, victim, R, victim, gamma, Tolerance{0.1 * spec.abs_tol, 0.1 * spec.rel_tol, 400});
  std::lock_guard lock(mu);
  if (cache.size() > 64) cache.clear();
  cache.emplace(key, g);
  return g;
}

// Normalized evaluation point: configuration with R_c = 1, P = 1, the
// Laplace variable and victim in the same units.
struct Normal {
  NetworkConfig c;
  double s = 0.0;
  Point victim = Point::Zero();
};

Normal prepare(const NetworkConfig& cfg, double s, const Point& victim) {
  cfg.validate();
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("Laplace variable s must be finite and >= 0");
  const NormalizedConfig n = normalize(cfg);
  return {n.config, s * n.power_scale, victim / n.length_scale};
}

IntensityProfile<double> unit_disk_weight(double R) { return IntensityProfile<double>::constant(1.0, R); }

// lambda/mu/nu/rho dependent pieces on top of a FieldGeometry.
struct LevelEvaluator {
  Normal n;
  Level level;
  QuadratureSpec spec;
  std::shared_ptr<const FieldGeometry> geo;
  std::vector<double> w_int;  // on radial nodes
  double w_err = 0.0;

  LevelEvaluator(Normal nn, Level lv, const QuadratureSpec& sp) : n(std::move(nn)), level(lv), spec(sp) {
    const NetworkConfig& c = n.c;
    const double bP = n.s;
    geo = field_geometry(c.femto_radius, c.pathloss_exponent, bP, n.victim, spec.remainder_radius(),
                         level == Level::macro, spec);
    const double bQ = n.s * c.femto_power;
    const Tolerance tol{1e-13, 1e-8, 200};
    w_int.resize(geo->radial.x.size());
    for (std::size_t i = 0; i < geo->radial.x.size(); ++i) {
      const QuadResult q = local_kernel_integral(bQ, geo->radial.x[i], c.femto_ue_profile, c.pathloss_exponent, tol);
      w_int[i] = q.value;
      w_err = std::max(w_err, q.error);
    }
  }

  LaplaceValue evaluate(Access access, double rho) const {
    const NetworkConfig& c = n.c;
    const double gamma = c.pathloss_exponent, R = c.femto_radius;
    const double lambda = c.macro_ue_density, mu = c.femto_bs_density;
    const double bP = n.s, bQ = n.s * c.femto_power, bV = n.s * rho;
    const double kappa = kernel_kappa(gamma);
    const double area = kPi * R * R;
    const double nu_bar = c.femto_ue_profile.mean_count();
    const double lambda_bar = area * lambda;

    LaplaceValue out;
    double err = 0.0;
    out.terms.macro = lambda * geo->plane.value;
    err += lambda * geo->plane.error;

    const double w_first = kappa * std::pow(bQ, 2.0 / gamma) * c.femto_ue_profile.radial_moment(2.0);
    const auto& rad = geo->radial;
    const auto& ang = geo->angular;
    const double outer = spec.remainder_radius();

    if (mu > 0.0) {
      if (access == Access::closed) {
        double sk = 0.0, sg = 0.0;
        for (std::size_t i = 0; i < rad.x.size(); ++i) {
          const double a = w_int[i];
          const double g = (-std::expm1(-a) - a) * 2.0 * kPi * rad.x[i];
          sk += rad.wk[i] * g;
          sg += rad.wg[i] * g;
        }
        const double A = bQ * c.femto_ue_profile.radial_moment(gamma);
        const FarTail tail = far_tail(A, A * ring_excess(gamma, R / outer),
                                      bQ * bQ * c.femto_ue_profile.radial_moment(2.0 * gamma), R, outer, gamma);
        out.terms.field = mu * (w_first + sk + tail.value);
        err += mu * (std::abs(sk - sg) + tail.error + kPi * outer * outer * w_err * 0.5);
      } else {
        const Tolerance tol{1e-13, 1e-8, 200};
        const auto unit = unit_disk_weight(R);
        std::vector<double> v_int(rad.x.size());
        double v_err = 0.0;
        for (std::size_t i = 0; i < rad.x.size(); ++i) {
          const QuadResult q = local_kernel_integral(bV, rad.x[i], unit, gamma, tol);
          v_int[i] = q.value;
          v_err = std::max(v_err, q.error);
        }
        double sk = 0.0, sg = 0.0, amax = 0.0;
        for (std::size_t i = 0; i < rad.x.size(); ++i) {
          double rk = 0.0, rg = 0.0;
          for (std::size_t j = 0; j < ang.x.size(); ++j) {
            const double a = w_int[i] + lambda * (v_int[i] - geo->u_int[i * ang.x.size() + j]);
            amax = std::max(amax, std::abs(a));
            const double g = -std::expm1(-a) - a;
            rk += ang.wk[j] * g;
            rg += ang.wg[j] * g;
          }
          sk += rad.wk[i] * rad.x[i] * rk;
          sg += rad.wg[i] * rad.x[i] * rg;
        }
        sk *= geo->angular_factor;
        sg *= geo->angular_factor;
        const double v_first = lambda * kappa * std::pow(bV, 2.0 / gamma) * kPi * std::pow(R, 4) / 2.0;
        const double u_first = lambda * area * geo->plane.value;
        // Far field: the W and V disks are radially weighted, so their
        // leading coefficients are exact up to the ring series; U uses the
        // hexagon mean of d^gamma and carries its lattice fluctuation.
        const double ratio = std::pow(outer / (outer - R), gamma);
        const double mw = bQ * c.femto_ue_profile.radial_moment(gamma);
        const double mv = lambda * bV * disk_moment(R, gamma);
        const double A = mw + mv - lambda * bP * area * hex_power_moment(gamma) / kHexArea;
        const double D = (mw + mv) * ring_excess(gamma, R / outer) + lambda * bP * area * ratio;
        const double S2 = bQ * bQ * c.femto_ue_profile.radial_moment(2.0 * gamma) +
                          lambda * (bV * bV * disk_moment(R, 2.0 * gamma) + bP * bP * area);
        const FarTail tail = far_tail(A, D, S2, R, outer, gamma);
        const double inner = kPi * outer * outer * std::max(amax, 1e-300) * (w_err + lambda * (v_err + geo->u_err));
        out.terms.field = mu * (w_first + v_first - u_first + sk + tail.value);
        err += mu * (lambda * area * geo->plane.error + std::abs(sk - sg) + tail.error + inner);
      }
    }

    if (level == Level::femto) {
      double in_cell = bQ * nu_bar / (bQ + 1.0);
      if (access == Access::open) {
        in_cell += bV * lambda_bar / (bV + 1.0) - lambda * geo->victim_disk.value;
        err += lambda * geo->victim_disk.error;
      }
      out.terms.in_cell = in_cell;
    }
    const double exponent = out.terms.macro + out.terms.field + out.terms.in_cell;
    out.value = std::exp(-exponent);
    out.error = out.value * err;
    if (!geo->plane.converged) out.error = std::max(out.error, out.value * geo->plane.error);
    return out;
  }

};

void check_quadrature(const LaplaceValue& v, const QuadratureSpec& spec) {
  if (!std::isfinite(v.value) || !std::isfinite(v.error))
    throw QuadratureError("Laplace evaluation produced a non-finite value", v.error);
  if (v.error > 1e3 * std::max(spec.abs_tol, spec.rel_tol * v.value))
    throw QuadratureError("quadrature did not reach the requested tolerance", v.error);
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
  if (truncation_radius && !(*truncation_radius >= 4.0))
    throw DomainError("quadrature truncation radius must be at least 4 R_c");
  if (hex_average_order < 2) throw DomainError("hexagon average order must be at least 2");
}

double hex_power_moment(double k) {
  if (!(k > -2.0)) throw DomainError("hex_power_moment: order must exceed -2");
  static std::mutex mu;
  static std::map<double, double> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  auto f = [k](double t) { return std::pow(1.0 / std::cos(t), k + 2.0); };
  const QuadResult q = integrate(f, 0.0, kPi / 6.0, Tolerance{1e-16, 1e-14, 200});
  const double m = 12.0 * std::pow(kApothem, k + 2.0) / (k + 2.0) * q.value;
  cache.emplace(k, m);
  return m;
}

double kernel_kappa(double gamma) {
  if (!(gamma > 2.0)) throw DomainError("pathloss exponent gamma must exceed 2");
  return 2.0 * kPi * kPi / (gamma * std::sin(2.0 * kPi / gamma));
}

QuadResult plane_kernel_integral(double b, const Point& victim, double gamma, const QuadratureSpec& spec) {
  if (!(gamma > 2.0)) throw DomainError("pathloss exponent gamma must exceed 2");
  if (!(b >= 0.0)) throw DomainError("kernel scale must be non-negative");
  QuadResult out;
  if (b == 0.0) return out;
  const double r_near = std::max(8.0, 1.0 + std::pow(b * 1e4, 1.0 / gamma));
  const double r1 = r_near + 20.0, r2 = r1 + 40.0;
  const Tolerance cell_tol{1e-3 * spec.abs_tol, 1e-2 * spec.rel_tol, 400};

  for_each_lattice_point(victim, r_near, [&](const Point& c, double) {
    out += cell_integral(c, victim, b, gamma, cell_tol);
  });

  std::vector<PowerTerm> terms;
  for (int n = 0; n <= 2; ++n)
    terms.push_back({b * ring_coefficient(gamma, n) * hex_power_moment(gamma + 2.0 * n), gamma + 2.0 * n});
  for (int n = 0; n <= 1; ++n)
    terms.push_back({-b * b * ring_coefficient(2.0 * gamma, n) * hex_power_moment(2.0 * gamma + 2.0 * n),
                     2.0 * gamma + 2.0 * n});
  terms.push_back({b * b * b * hex_power_moment(3.0 * gamma), 3.0 * gamma});
  const PowerTerm next{b * ring_coefficient(gamma, 3) * hex_power_moment(gamma + 6.0), gamma + 6.0};
  auto far = [&](double r) {
    double v = 0.0;
    for (const auto& t : terms) v += t.coeff * std::pow(r, -t.power);
    return v;
  };

  double direct = 0.0, trunc = 0.0;
  for_each_lattice_point(victim, r2, [&](const Point&, double r) {
    if (r < r_near) return;
    const double w = 1.0 - smooth_step((r - r1) / (r2 - r1));
    direct += far(r) * w;
    trunc += next.coeff * std::pow(r, -next.power) * w;
  });
  auto band = [&](double r) { return far(r) * smooth_step((r - r1) / (r2 - r1)) * 2.0 * kPi * r; };
  const QuadResult bq = integrate(band, r1, r2, Tolerance{1e-16, 1e-12, 200});
  double tail = 0.0;
  for (const auto& t : terms) tail += t.coeff * 2.0 * kPi * std::pow(r2, 2.0 - t.power) / (t.power - 2.0);
  trunc += next.coeff * 2.0 * kPi * std::pow(r1, 2.0 - next.power) / (next.power - 2.0) / kHexArea;
  out.value += direct + (bq.value + tail) / kHexArea;
  out.error += trunc + bq.error / kHexArea;
  return out;
}

QuadResult disk_kernel_integral(double b, const Point& center, double radius, const Point& victim, double gamma,
                                Tolerance tol) {
  if (!(radius > 0.0)) throw DomainError("disk radius must be positive");
  QuadResult out;
  if (b == 0.0) return out;
  const HexGrid<double> grid(1.0);

  std::vector<Point> cands;
  for_each_lattice_point(center, radius + 1.0 + 1e-9, [&](const Point& c, double) { cands.push_back(c); });

  std::vector<double> tb{0.0, 0.5 * kPi, kPi, 1.5 * kPi, 2.0 * kPi};
  auto add_angle = [&](const Point& p) {
    double t = std::atan2(p.y() - center.y(), p.x() - center.x());
    if (t < 0) t += 2 * kPi;
    tb.push_back(t);
  };
  const double dv = (victim - center).norm();
  if (dv < radius && dv > 0.0) add_angle(victim);
  for (const Point& c : cands) {
    for (int k = 0; k < 6; ++k) {
      const Point p1 = hex_vertex(c, k), p2 = hex_vertex(c, k + 1);
      if ((p1 - center).norm() < radius) add_angle(p1);
      // circle / edge intersections
      const Point d = p2 - p1, f = p1 - center;
      const double A = d.squaredNorm(), B = 2 * f.dot(d), C = f.squaredNorm() - radius * radius;
      const double disc = B * B - 4 * A * C;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        for (double u : {(-B - sq) / (2 * A), (-B + sq) / (2 * A)})
          if (u >= 0.0 && u <= 1.0) add_angle(p1 + u * d);
      }
    }
  }
  std::sort(tb.begin(), tb.end());
  tb.erase(std::unique(tb.begin(), tb.end(), [](double a, double c) { return std::abs(a - c) < 1e-12; }),
           tb.end());

  double inner_err = 0.0;
  long evals = 0;
  bool conv = true;
  std::vector<double> br;
  std::vector<Point> serving;
  const Tolerance inner_tol{tol.abs / (2 * kPi), tol.rel, tol.max_intervals};
  auto outer = [&](double t) {
    const Point e(std::cos(t), std::sin(t));
    // cell crossings along the ray
    br.assign({0.0, radius});
    for (std::size_t i = 0; i < cands.size(); ++i) {
      for (std::size_t j = i + 1; j < cands.size(); ++j) {
        const Point& ci = cands[i];
        const Point& cj = cands[j];
        const double A = (center - cj).squaredNorm() - (center - ci).squaredNorm();
        const double B = 2.0 * e.dot(ci - cj);
        if (B == 0.0) continue;
        const double r = -A / B;
        if (r > 0.0 && r < radius) br.push_back(r);
      }
    }
    std::sort(br.begin(), br.end());
    serving.clear();
    std::vector<double> keep{br.front()};
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      if (!(br[k + 1] > br[k])) continue;
      const Point mid = center + 0.5 * (br[k] + br[k + 1]) * e;
      const Point c = nearest_bs(mid, grid);
      if (!serving.empty() && serving.back() == c) {
        keep.back() = br[k + 1];
      } else {
        serving.push_back(c);
        keep.push_back(br[k + 1]);
      }
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < serving.size(); ++k) {
      const Point c = serving[k];
      auto f = [&](double r) {
        const Point x = center + r * e;
        return kernel(b, (x - c).norm(), (x - victim).norm(), gamma) * r;
      };
      const QuadResult q = integrate(f, keep[k], keep[k + 1], inner_tol);
      sum += q.value;
      inner_err += q.error;
      evals += q.evaluations;
      conv = conv && q.converged;
    }
    return sum;
  };
  out = integrate(outer, std::span<const double>(tb), tol);
  // inner errors summed over all outer nodes overstate the weighted error;
  // scale by the mean node weight.
  out.error += inner_err * (2 * kPi) / std::max<long>(1, out.evaluations);
  out.evaluations += evals;
  out.converged = out.converged && conv;
  return out;
}

QuadResult local_kernel_integral(double b, double offset, const IntensityProfile<double>& weight, double gamma,
                                 Tolerance tol) {
  QuadResult out;
  if (b == 0.0 || weight.is_zero()) return out;
  const double R = weight.outer_radius();
  std::vector<double> br{0.0};
  for (const auto& st : weight.steps()) br.push_back(st.break_radius);
  if (offset > 0.0 && offset < R) br.push_back(offset);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());

  double inner_err = 0.0;
  long evals = 0;
  bool conv = true;
  const Tolerance inner_tol{tol.abs / kPi, tol.rel, tol.max_intervals};
  auto outer = [&](double t) {
    const double ct = std::cos(t);
    auto f = [&](double r) {
      const double w = weight.density_at(r);
      if (w == 0.0) return 0.0;
      const double dist = std::sqrt(std::max(0.0, r * r + offset * offset + 2.0 * r * offset * ct));
      return kernel(b, r, dist, gamma) * w * r;
    };
    const QuadResult q = integrate(f, std::span<const double>(br), inner_tol);
    inner_err = std::max(inner_err, q.error);
    evals += q.evaluations;
    conv = conv && q.converged;
    return q.value;
  };
  const double tbr[3] = {0.0, 0.5 * kPi, kPi};
  out = integrate(outer, std::span<const double>(tbr, 3), tol);
  out.value *= 2.0;
  out.error = 2.0 * (out.error + inner_err * kPi);
  out.evaluations += evals;
  out.converged = out.converged && conv;
  return out;
}

LaplaceValue eval_L0(double s, const NetworkConfig& cfg, const QuadratureSpec& spec, const Point& victim) {
  spec.validate();
  const Normal n = prepare(cfg, s, victim);
  const QuadResult k = plane_kernel_integral(n.s, n.victim, n.c.pathloss_exponent, spec);
  LaplaceValue v;
  v.terms.macro = n.c.macro_ue_density * k.value;
  v.value = std::exp(-v.terms.macro);
  v.error = v.value * n.c.macro_ue_density * k.error;
  check_quadrature(v, spec);
  return v;
}

namespace {
LaplaceValue from_exponent(double e, double err) {
  LaplaceValue v;
  v.terms.field = e;
  v.value = std::exp(-e);
  v.error = v.value * err;
  return v;
}
}  // namespace

LaplaceValue eval_W(double s, const Point& x0, const NetworkConfig& cfg, const QuadratureSpec& spec,
                    const Point& victim) {
  spec.validate();
  const Normal n = prepare(cfg, s, victim);
  const Point p = x0 / cfg.cell_radius;
  const QuadResult q = local_kernel_integral(n.s * n.c.femto_power, (p - n.victim).norm(), n.c.femto_ue_profile,
                                             n.c.pathloss_exponent,
                                             Tolerance{0.1 * spec.abs_tol, 0.1 * spec.rel_tol, 400});
  return from_exponent(q.value, q.error);
}

LaplaceValue eval_V(double s, const Point& x0, const NetworkConfig& cfg, const QuadratureSpec& spec,
                    const Point& victim) {
  spec.validate();
  const Normal n = prepare(cfg, s, victim);
  const Point p = x0 / cfg.cell_radius;
  const double lambda = n.c.macro_ue_density;
  const QuadResult q =
      local_kernel_integral(n.s * n.c.rho, (p - n.victim).norm(), unit_disk_weight(n.c.femto_radius),
                            n.c.pathloss_exponent, Tolerance{0.1 * spec.abs_tol, 0.1 * spec.rel_tol, 400});
  return from_exponent(lambda * q.value, lambda * q.error);
}

LaplaceValue eval_U(double s, const Point& x0, const NetworkConfig& cfg, const QuadratureSpec& spec,
                    const Point& victim) {
  spec.validate();
  const Normal n = prepare(cfg, s, victim);
  const Point p = x0 / cfg.cell_radius;
  const double lambda = n.c.macro_ue_density;
  const QuadResult q = disk_kernel_integral(n.s, p, n.c.femto_radius, n.victim, n.c.pathloss_exponent,
                                            Tolerance{0.1 * spec.abs_tol, 0.1 * spec.rel_tol, 400});
  return from_exponent(lambda * q.value, lambda * q.error);
}

LaplaceValue laplace(const LaplaceContext& ctx, const QuadratureSpec& spec) {
  spec.validate();
  const Point victim = ctx.level == Level::macro ? Point::Zero() : ctx.x_b;
  Normal n = prepare(ctx.config, ctx.s, victim);
  const double rho = n.c.rho;
  const LevelEvaluator ev(std::move(n), ctx.level, spec);
  LaplaceValue v = ev.evaluate(ctx.access, rho);
  check_quadrature(v, spec);
  return v;
}

LaplaceValue macro_laplace(double s, const NetworkConfig& cfg, Access access, const QuadratureSpec& spec) {
  return laplace(LaplaceContext{cfg, s, Level::macro, access, Point::Zero()}, spec);
}

LaplaceValue femto_laplace(double s, const Point& x_b, const NetworkConfig& cfg, Access access,
                           const QuadratureSpec& spec) {
  return laplace(LaplaceContext{cfg, s, Level::femto, access, x_b}, spec);
}

OutageValue macro_outage(const NetworkConfig& cfg, Access access, const QuadratureSpec& spec) {
  const LaplaceValue v = macro_laplace(cfg.sir_threshold / cfg.macro_power, cfg, access, spec);
  return {1.0 - v.value, v.error};
}

OutageValue femto_outage(const Point& x_b, const NetworkConfig& cfg, Access access, const QuadratureSpec& spec) {
  const LaplaceValue v = femto_laplace(cfg.sir_threshold / cfg.femto_power, x_b, cfg, access, spec);
  return {1.0 - v.value, v.error};
}

QuadResult average_over_hexagon(const std::function<double(const Point&)>& f, const HexGrid<double>& grid,
                                int order, bool d6_symmetric) {
  if (order < 2) throw DomainError("hexagon average order must be at least 2");
  const double rc = grid.cell_radius();
  const double area = hex_area(grid);
  // Collapsed coordinates on the triangles (0, a, b), exact for polynomials.
  auto rule = [&](int n) {
    const GaussRule& g = gauss_legendre(n);
    const int sectors = d6_symmetric ? 1 : 6;
    double sum = 0.0;
    for (int k = 0; k < sectors; ++k) {
      const double t0 = kPi / 3.0 * k;
      const Point a = rc * Point(std::cos(t0), std::sin(t0));
      const Point b = d6_symmetric ? Point(rc * kApothem * Point(std::cos(kPi / 6.0), std::sin(kPi / 6.0)))
                                   : Point(rc * Point(std::cos(t0 + kPi / 3.0), std::sin(t0 + kPi / 3.0)));
      double tri = 0.0;
      for (int i = 0; i < n; ++i) {
        const double u = 0.5 * (1.0 + g.nodes[i]);
        double inner = 0.0;
        for (int j = 0; j < n; ++j) {
          const double w = 0.5 * (1.0 + g.nodes[j]);
          inner += 0.5 * g.weights[j] * f(Point(u * ((1.0 - w) * a + w * b)));
        }
        tri += 0.5 * g.weights[i] * u * inner;
      }
      sum += std::abs(a.x() * b.y() - a.y() * b.x()) * tri;
    }
    return sum * (d6_symmetric ? 12.0 : 1.0) / area;
  };
  QuadResult out;
  out.value = rule(order);
  out.error = std::abs(out.value - rule(order - 1));
  out.evaluations = (order * order + (order - 1) * (order - 1)) * (d6_symmetric ? 1 : 6);
  return out;
}

OutageValue femto_outage_avg(const NetworkConfig& cfg, Access access, const QuadratureSpec& spec) {
  spec.validate();
  cfg.validate();
  double max_err = 0.0;
  auto f = [&](const Point& x_b) {
    const OutageValue o = femto_outage(x_b, cfg, access, spec);
    max_err = std::max(max_err, o.quad_error);
    return o.probability;
  };
  const QuadResult q = average_over_hexagon(f, cfg.grid(), spec.hex_average_order, true);
  return {q.value, q.error + max_err};
}

// ---------------------------------------------------------------------------

struct AccessComparator::Impl {
  LevelEvaluator ev;
  QuadratureSpec spec;
};

AccessComparator::AccessComparator(const NetworkConfig& cfg, Level level, const Point& x_b,
                                   const QuadratureSpec& spec) {
  spec.validate();
  const double s = level == Level::macro ? cfg.sir_threshold / cfg.macro_power : cfg.sir_threshold / cfg.femto_power;
  Normal n = prepare(cfg, s, level == Level::macro ? Point::Zero() : x_b);
  impl_ = std::make_unique<Impl>(Impl{LevelEvaluator(std::move(n), level, spec), spec});
}

AccessComparator::~AccessComparator() = default;
AccessComparator::AccessComparator(AccessComparator&&) noexcept = default;
AccessComparator& AccessComparator::operator=(AccessComparator&&) noexcept = default;

OutageValue AccessComparator::outage(Access access, double rho) const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("power enhancement rho must be positive");
  const LaplaceValue v = impl_->ev.evaluate(access, rho);
  check_quadrature(v, impl_->spec);
  return {1.0 - v.value, v.error};
}

OutageValue AccessComparator::difference(double rho) const {
  const OutageValue o = outage(Access::open, rho);
  const OutageValue c = outage(Access::closed, rho);
  return {o.probability - c.probability, o.quad_error + c.quad_error};
}

}  // namespace femto
