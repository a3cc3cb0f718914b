#include "femto/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "femto/quadrature.hpp"

namespace femto::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt3 = std::sqrt(3.0);

double phi(double x) { return x / (x + 1.0); }

Point lattice(long a, long b) { return {1.5 * double(a), kSqrt3 / 2.0 * double(a) + kSqrt3 * double(b)}; }

// Composite rule on the given breakpoints.
template <typename F>
double panels(F&& f, const std::vector<double>& br, int order) {
  const GaussRule& g = gauss_legendre(order);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double a = br[k], b = br[k + 1], h = 0.5 * (b - a);
    if (h <= 0.0) continue;
    for (int i = 0; i < order; ++i) sum += g.weights[i] * h * f(a + h * (1.0 + g.nodes[i]));
  }
  return sum;
}

std::vector<double> uniform(double a, double b, int n) {
  std::vector<double> br;
  for (int k = 0; k <= n; ++k) br.push_back(a + (b - a) * double(k) / n);
  return br;
}

// Breakpoints on [a, b] refined geometrically towards p in [a, b].
std::vector<double> graded(double a, double b, double p, int levels) {
  std::vector<double> br{a, p, b};
  for (int k = 1; k <= levels; ++k) {
    br.push_back(p - (p - a) * std::pow(0.3, k));
    br.push_back(p + (b - p) * std::pow(0.3, k));
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

// Integral over the triangle (A, B, C) in collapsed coordinates about A.
template <typename F>
double triangle(F&& f, const Point& A, const Point& B, const Point& C, int order, bool grade_apex) {
  const double jac = std::abs((B - A).x() * (C - A).y() - (B - A).y() * (C - A).x());
  const std::vector<double> ub = grade_apex ? std::vector<double>{0.0, 1e-4, 1e-3, 1e-2, 0.05, 0.2, 0.5, 1.0}
                                            : std::vector<double>{0.0, 0.5, 1.0};
  return jac * panels(
                   [&](double u) {
                     return u * panels([&](double w) { return f(Point(A + u * ((1.0 - w) * (B - A) + w * (C - A)))); },
                                       {0.0, 0.5, 1.0}, order);
                   },
                   ub, order);
}

double hex_moment(double k) {
  double sum = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double t0 = kPi / 3.0 * j, t1 = t0 + kPi / 3.0;
    sum += triangle([&](const Point& y) { return std::pow(y.norm(), k); }, Point::Zero(),
                    Point(std::cos(t0), std::sin(t0)), Point(std::cos(t1), std::sin(t1)), 16, true);
  }
  return sum;
}

double annulus(const std::function<double(const Point&)>& f, const Point& c, double r0, double r1, int panels_r,
               int panels_t, int order, double theta0) {
  return panels(
      [&](double t) {
        const Point e(std::cos(t), std::sin(t));
        return panels([&](double r) { return f(Point(c + r * e)) * r; }, uniform(r0, r1, panels_r), order);
      },
      uniform(theta0, theta0 + 2.0 * kPi, panels_t), order);
}

}  // namespace

Point nearest_bs_exhaustive(const Point& p, double cell_radius, int range) {
  const Point q = p / cell_radius;
  const long a0 = std::lround(q.x() / 1.5);
  const long b0 = std::lround((q.y() - kSqrt3 / 2.0 * double(a0)) / kSqrt3);
  Point best = Point::Zero();
  long ba = 0, bb = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (long a = a0 - range; a <= a0 + range; ++a)
    for (long b = b0 - range; b <= b0 + range; ++b) {
      const double d = (q - lattice(a, b)).squaredNorm();
      if (d < best_d || (d == best_d && (a < ba || (a == ba && b < bb)))) {
        best_d = d;
        best = lattice(a, b);
        ba = a;
        bb = b;
      }
    }
  return best * cell_radius;
}

double disk_integral(const std::function<double(const Point&)>& f, const Point& center, double radius,
                     int panels_r, int panels_t, int order, double theta0) {
  return annulus(f, center, 0.0, radius, panels_r, panels_t, order, theta0);
}

double v_plane_bruteforce(double t, double gamma, double R) {
  // G(r0): disk integral about x0 = (r0, 0), using the mirror symmetry in y.
  auto G = [&](double r0) {
    const bool kink = r0 < 1.5 * R;
    const std::vector<double> tb = kink ? graded(0.0, kPi, kPi, 10) : uniform(0.0, kPi, 4);
    const std::vector<double> sb = kink && r0 < R ? graded(0.0, R, r0, 10) : uniform(0.0, R, 2);
    const int order = kink ? 12 : 16;
    return 2.0 * panels(
                     [&](double th) {
                       const Point e(std::cos(th), std::sin(th));
                       return panels(
                           [&](double s) {
                             const double d = (Point(r0, 0.0) + s * e).norm();
                             return phi(t * std::pow(s / d, gamma)) * s;
                           },
                           sb, order);
                     },
                     tb, order);
  };
  std::vector<double> rb = graded(0.0, 2.0 * R, R, 8);
  double r = 2.0 * R;
  while (r < 16384.0 * R) {
    r *= 2.0;
    rb.push_back(r);
  }
  const double body = panels([&](double r0) { return 2.0 * kPi * r0 * G(r0); }, rb, 16);
  const double S = 2.0 * kPi * std::pow(R, gamma + 2.0) / (gamma + 2.0);
  const double tail = 2.0 * kPi * t * S * std::pow(r, 2.0 - gamma) / (gamma - 2.0);
  return body + tail;
}

double cu_cellwise(double T, double gamma, const Point& v) {
  constexpr double kNear = 40.0, kFar = 2000.0;
  double near = 0.0;
  const long amax = long(kNear / 1.5) + 2;
  for (long a = long(v.x() / 1.5) - amax; a <= long(v.x() / 1.5) + amax; ++a) {
    const long bc = std::lround((v.y() - kSqrt3 / 2.0 * double(a)) / kSqrt3);
    for (long b = bc - amax; b <= bc + amax; ++b) {
      const Point c = lattice(a, b);
      if ((c - v).norm() > kNear) continue;
      auto f = [&](const Point& x) {
        const double dv = (x - v).norm();
        if (dv == 0.0) return 1.0;
        return phi(T * std::pow((x - c).norm() / dv, gamma));
      };
      const bool host = (nearest_bs_exhaustive(v, 1.0) - c).norm() < 1e-12;
      const Point apex = host ? v : c;
      for (int j = 0; j < 6; ++j) {
        const double t0 = kPi / 3.0 * j, t1 = t0 + kPi / 3.0;
        near += triangle(f, apex, c + Point(std::cos(t0), std::sin(t0)), c + Point(std::cos(t1), std::sin(t1)), 16,
                         host);
      }
    }
  }
  const double m1 = hex_moment(gamma), m2 = hex_moment(2.0 * gamma);
  double mid = 0.0;
  const long bmax = long(kFar / 1.5) + 2;
  for (long a = -bmax; a <= bmax; ++a) {
    const long bc = std::lround((v.y() - kSqrt3 / 2.0 * double(a)) / kSqrt3);
    for (long b = bc - bmax; b <= bc + bmax; ++b) {
      const double d = (lattice(a, b) - v).norm();
      if (d <= kNear || d > kFar) continue;
      const double dg = std::pow(d, -gamma);
      mid += T * m1 * dg - T * T * m2 * dg * dg;
    }
  }
  const double area = 1.5 * kSqrt3;
  const double tail = T * m1 / area * 2.0 * kPi * std::pow(kFar, 2.0 - gamma) / (gamma - 2.0);
  return near + mid + tail;
}

double w_exponent(double s, const Point& x0, const NetworkConfig& cfg, const Point& victim) {
  const double g = cfg.pathloss_exponent, b = s * cfg.femto_power;
  double total = 0.0, inner = 0.0;
  for (const auto& st : cfg.femto_ue_profile.steps()) {
    if (st.density > 0.0)
      total += st.density * annulus(
                                [&](const Point& x) {
                                  const double dv = (x - victim).norm();
                                  return dv == 0.0 ? 1.0 : phi(b * std::pow((x - x0).norm() / dv, g));
                                },
                                x0, inner, st.break_radius, 8, 32, 16, 0.0);
    inner = st.break_radius;
  }
  return total;
}

double v_exponent(double s, const Point& x0, const NetworkConfig& cfg, const Point& victim) {
  const double g = cfg.pathloss_exponent, b = s * cfg.rho * cfg.macro_power;
  return cfg.macro_ue_density * disk_integral(
                                    [&](const Point& x) {
                                      const double dv = (x - victim).norm();
                                      return dv == 0.0 ? 1.0 : phi(b * std::pow((x - x0).norm() / dv, g));
                                    },
                                    x0, cfg.femto_radius, 8, 32, 16);
}

double u_exponent(double s, const Point& x0, const NetworkConfig& cfg, const Point& victim) {
  const double g = cfg.pathloss_exponent, b = s * cfg.macro_power;
  return cfg.macro_ue_density *
         disk_integral(
             [&](const Point& x) {
               const double dv = (x - victim).norm();
               const double d = (x - nearest_bs_exhaustive(x, cfg.cell_radius, 1)).norm();
               return dv == 0.0 ? (d == 0.0 ? phi(b) : 1.0) : phi(b * std::pow(d / dv, g));
             },
             x0, cfg.femto_radius, 16, 64, 12);
}

double r_in_cell(const Point& x_b, double t_prime, double gamma, double R) {
  return disk_integral(
      [&](const Point& x) {
        const double dv = (x - x_b).norm();
        const double d = (x - nearest_bs_exhaustive(x, 1.0, 1)).norm();
        return dv == 0.0 ? (d == 0.0 ? phi(t_prime) : 1.0) : phi(t_prime * std::pow(d / dv, gamma));
      },
      x_b, R, 16, 64, 12);
}

RPair r_min_max_gamma4(const Point& x_b, double t_prime, double R) {
  auto H = [&](double D) {
    const double sb = std::sqrt(t_prime) * D * D;
    return sb == 0.0 ? 0.0 : kPi * sb / 2.0 * std::atan(R * R / sb);
  };
  const double xb = x_b.norm();
  RPair out;
  out.r_min = xb <= R ? H(xb) : H(xb - R) + H(xb);
  out.r_max = H(xb + R) + H(std::hypot(xb, R));
  return out;
}

double hexagon_mean(const std::function<double(const Point&)>& f, double cell_radius, int order) {
  double sum = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double t0 = kPi / 3.0 * j, t1 = t0 + kPi / 3.0;
    sum += triangle(f, Point::Zero(), cell_radius * Point(std::cos(t0), std::sin(t0)),
                    cell_radius * Point(std::cos(t1), std::sin(t1)), order, false);
  }
  return sum / (1.5 * kSqrt3 * cell_radius * cell_radius);
}

}  // namespace femto::oracle
