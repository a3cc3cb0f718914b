#include "femto/bounds.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "femto/errors.hpp"

namespace femto {

namespace {

constexpr double kPi = std::numbers::pi;

void require_gamma(double gamma) {
  if (!(gamma > 2.0) || !std::isfinite(gamma)) throw DomainError("pathloss exponent gamma must exceed 2");
}

Certificate verdict(double open_better, double closed_better) {
  if (open_better > 0.0) return Certificate::open_better;
  if (closed_better > 0.0) return Certificate::closed_better;
  return Certificate::inconclusive;
}

// Zero of a monotone function on log rho. `decreasing` gives the expected
// direction; the bracket is widened by decades up to [1e-12, 1e14].
template <typename F>
OneSidedRoot monotone_root(F&& f, bool decreasing, double rel_tol) {
  double lo = 1e-2, hi = 1e6;
  auto sgn = [&](double r) { return decreasing ? f(r) : -f(r); };  // positive below the root
  while (sgn(lo) <= 0.0 && lo > 1e-12) lo /= 10.0;
  while (sgn(hi) >= 0.0 && hi < 1e14) hi *= 10.0;
  if (sgn(lo) <= 0.0) return {lo, false};
  if (sgn(hi) >= 0.0) return {hi, false};
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    if (sgn(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return {std::sqrt(lo * hi), true};
}

RootResult bisect_difference(const AccessComparator& cmp, double lo, double hi, double rel_tol) {
  RootResult out;
  out.lo = lo;
  out.hi = hi;
  auto diff = [&](double r) {
    ++out.evaluations;
    return cmp.difference(r).probability;
  };
  double flo = diff(lo), fhi = diff(hi);
  if (!(flo < 0.0 && fhi > 0.0)) {
    out.status = RootStatus::no_sign_change;
    out.note = "outage difference does not change sign on the bracket";
    return out;
  }
  while (hi / lo - 1.0 > rel_tol) {
    const double mid = std::sqrt(lo * hi);
    const double fm = diff(mid);
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  // secant step in log rho inside the final bracket
  const double t = flo / (flo - fhi);
  out.rho = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  out.lo = lo;
  out.hi = hi;
  out.status = RootStatus::found;
  return out;
}

double half_disk_term(double D, double t_prime, double gamma, double R) {
  if (D <= 0.0) return 0.0;
  const double B = t_prime * std::pow(D, gamma);
  auto f = [&](double r) {
    if (r == 0.0) return 0.0;
    const double x = B / std::pow(r, gamma);
    return r * x / (x + 1.0);
  };
  return kPi * integrate(f, 0.0, R, Tolerance{1e-15, 1e-12, 400}).value;
}

}  // namespace

const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::open_better: return "open_better";
    case Certificate::closed_better: return "closed_better";
    case Certificate::inconclusive: return "inconclusive";
    case Certificate::degenerate: return "degenerate";
  }
  return "?";
}

const char* to_string(RootStatus s) {
  switch (s) {
    case RootStatus::found: return "found";
    case RootStatus::degenerate: return "degenerate";
    case RootStatus::no_sign_change: return "no_sign_change";
  }
  return "?";
}

double shape_factor(double gamma) {
  require_gamma(gamma);
  return 1.0 / 8.0 + 1.0 / (4.0 * (gamma + 2.0)) + 1.0 / ((gamma + 2.0) * (gamma - 2.0));
}

VBounds v_bounds(double t_eff_rho, double gamma, double femto_radius) {
  require_gamma(gamma);
  if (!(t_eff_rho > 0.0) || !(femto_radius > 0.0)) throw DomainError("v_bounds: arguments must be positive");
  const double v_max =
      4.0 * kPi * kPi * std::pow(femto_radius, 4) * std::pow(t_eff_rho, 2.0 / gamma) * shape_factor(gamma);
  return {v_max / 2.0, v_max};
}

QuadResult compute_Cu(double threshold, double gamma, const Point& victim, const QuadratureSpec& spec) {
  require_gamma(gamma);
  if (!(threshold >= 0.0)) throw DomainError("compute_Cu: threshold must be non-negative");
  static std::mutex mu;
  static std::map<std::tuple<double, double, double, double, double, double>, QuadResult> cache;
  const auto key = std::make_tuple(threshold, gamma, victim.x(), victim.y(), spec.rel_tol, spec.abs_tol);
  {
    std::lock_guard lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const QuadResult q = plane_kernel_integral(threshold, victim, gamma, spec);
  if (!q.converged) throw QuadratureError("C_u quadrature did not converge", q.error);
  std::lock_guard lock(mu);
  cache.emplace(key, q);
  return q;
}

SufficientConditions macro_sufficient_conditions(const NetworkConfig& cfg) {
  cfg.validate();
  const NetworkConfig c = normalize(cfg).config;
  const double gamma = c.pathloss_exponent, R = c.femto_radius, T = c.sir_threshold;
  const DerivedQuantities d = derived_quantities(c);
  const VBounds v = v_bounds(T * c.rho, gamma, R);
  const double cu = compute_Cu(T, gamma).value;
  const double area = kPi * R * R;
  SufficientConditions out;
  out.open_better = -v.v_max + area * cu * std::exp(-d.nu_bar);
  out.closed_better = -area * cu * std::exp(d.lambda_bar) + v.v_min * std::exp(-d.lambda_bar - d.nu_bar);
  out.verdict = (c.femto_bs_density == 0.0 || c.macro_ue_density == 0.0)
                    ? Certificate::degenerate
                    : verdict(out.open_better, out.closed_better);
  return out;
}

RhoBounds rho_star_bounds(const NetworkConfig& cfg) {
  cfg.validate();
  const NetworkConfig c = normalize(cfg).config;
  const double gamma = c.pathloss_exponent, R = c.femto_radius, T = c.sir_threshold;
  const DerivedQuantities d = derived_quantities(c);
  const double cu = compute_Cu(T, gamma).value;
  const double B = shape_factor(gamma);
  const double lo = std::pow(cu * std::exp(-d.nu_bar) / (4.0 * kPi * R * R * B), gamma / 2.0) / T;
  const double hi = std::pow(cu * std::exp(d.nu_bar + 2.0 * d.lambda_bar) / (2.0 * kPi * R * R * B), gamma / 2.0) / T;
  return {lo, hi};
}

RootResult rho_star_exact(const NetworkConfig& cfg, const QuadratureSpec& spec, double rel_tol) {
  cfg.validate();
  if (cfg.femto_bs_density == 0.0 || cfg.macro_ue_density == 0.0) {
    RootResult r;
    r.status = RootStatus::degenerate;
    r.note = cfg.femto_bs_density == 0.0 ? "mu = 0: open and closed access coincide for every rho"
                                         : "lambda = 0: no macro UE is ever handed off";
    return r;
  }
  const RhoBounds b = rho_star_bounds(cfg);
  const AccessComparator cmp(cfg, Level::macro, Point::Zero(), spec);
  return bisect_difference(cmp, b.rho_min / 10.0, b.rho_max * 10.0, rel_tol);
}

RBounds r_min_max(const Point& x_b, double t_prime, double gamma, double femto_radius) {
  require_gamma(gamma);
  if (!(t_prime > 0.0) || !(femto_radius > 0.0)) throw DomainError("r_min_max: arguments must be positive");
  const double xb = x_b.norm(), R = femto_radius;
  RBounds out;
  if (xb <= R) {
    out.r_min = half_disk_term(xb, t_prime, gamma, R);
  } else {
    out.r_min = half_disk_term(xb - R, t_prime, gamma, R) + half_disk_term(xb, t_prime, gamma, R);
  }
  out.r_max = half_disk_term(xb + R, t_prime, gamma, R) + half_disk_term(std::hypot(xb, R), t_prime, gamma, R);
  return out;
}

namespace {

struct FemtoTerms {
  double mu, area, tp, gamma, R, nu_bar, lambda_bar, cu, r_min, r_max;
  double k1(double rho) const {
    const VBounds v = v_bounds(tp * rho, gamma, R);
    return -mu * v.v_max + mu * area * cu * std::exp(-nu_bar) - area * tp * rho / (tp * rho + 1.0) + r_min;
  }
  double k2(double rho) const {
    const VBounds v = v_bounds(tp * rho, gamma, R);
    return -mu * area * cu * std::exp(lambda_bar) + mu * v.v_min * std::exp(-nu_bar - lambda_bar) +
           area * tp * rho / (tp * rho + 1.0) - r_max;
  }
};

FemtoTerms femto_terms(const Point& x_b, const NetworkConfig& cfg) {
  cfg.validate();
  const NormalizedConfig n = normalize(cfg);
  const NetworkConfig& c = n.config;
  const Point xb = x_b / n.length_scale;
  const double tp = c.sir_threshold / c.femto_power;
  const DerivedQuantities d = derived_quantities(c);
  const RBounds r = r_min_max(xb, tp, c.pathloss_exponent, c.femto_radius);
  const double cu = compute_Cu(tp, c.pathloss_exponent, xb).value;
  return {c.femto_bs_density, kPi * c.femto_radius * c.femto_radius, tp, c.pathloss_exponent, c.femto_radius,
          d.nu_bar, d.lambda_bar, cu, r.r_min, r.r_max};
}

bool disk_inside_cell(const Point& x_b_norm, double R) {
  const double a = std::sqrt(3.0) / 2.0;
  for (int k = 0; k < 6; ++k) {
    const double t = kPi / 6.0 + kPi / 3.0 * k;
    if (x_b_norm.x() * std::cos(t) + x_b_norm.y() * std::sin(t) + R > a) return false;
  }
  return true;
}

}  // namespace

FemtoConditions femto_sufficient_conditions(const Point& x_b, const NetworkConfig& cfg) {
  const FemtoTerms t = femto_terms(x_b, cfg);
  const double rho = normalize(cfg).config.rho;
  FemtoConditions out{t.k1(rho), t.k2(rho), Certificate::inconclusive};
  out.verdict = cfg.macro_ue_density == 0.0 ? Certificate::degenerate : verdict(out.k1, out.k2);
  // R_min bounds the in-cell integral only when the femtocell lies inside H(0).
  if (out.verdict == Certificate::open_better && !disk_inside_cell(x_b / cfg.cell_radius, t.R))
    out.verdict = Certificate::inconclusive;
  return out;
}

Rho2Bounds rho_star2_bounds(const Point& x_b, const NetworkConfig& cfg) {
  const FemtoTerms t = femto_terms(x_b, cfg);
  Rho2Bounds out;
  out.rho_min = monotone_root([&](double r) { return t.k1(r); }, true, 1e-10);
  out.rho_max = monotone_root([&](double r) { return t.k2(r); }, false, 1e-10);
  return out;
}

RootResult rho_star2_exact(const Point& x_b, const NetworkConfig& cfg, const QuadratureSpec& spec, double rel_tol) {
  cfg.validate();
  if (cfg.macro_ue_density == 0.0) {
    RootResult r;
    r.status = RootStatus::degenerate;
    r.note = "lambda = 0: open and closed access coincide at the femtocell for every rho";
    return r;
  }
  const Rho2Bounds b = rho_star2_bounds(x_b, cfg);
  const double lo = b.rho_min.found ? b.rho_min.rho / 10.0 : 1e-2;
  const double hi = b.rho_max.found ? b.rho_max.rho * 10.0 : 1e6;
  const AccessComparator cmp(cfg, Level::femto, x_b, spec);
  return bisect_difference(cmp, lo, hi, rel_tol);
}

MacroBoundsReport macro_bounds_report(const NetworkConfig& cfg, bool with_exact, const QuadratureSpec& spec) {
  cfg.validate();
  const NetworkConfig c = normalize(cfg).config;
  MacroBoundsReport rep;
  rep.v = v_bounds(c.sir_threshold * c.rho, c.pathloss_exponent, c.femto_radius);
  rep.c_u = compute_Cu(c.sir_threshold, c.pathloss_exponent).value;
  rep.conditions = macro_sufficient_conditions(cfg);
  rep.rho_star = rho_star_bounds(cfg);
  if (with_exact) rep.exact = rho_star_exact(cfg, spec);
  return rep;
}

FemtoBoundsReport femto_bounds_report(const Point& x_b, const NetworkConfig& cfg, bool with_exact,
                                      const QuadratureSpec& spec) {
  cfg.validate();
  const NormalizedConfig n = normalize(cfg);
  const NetworkConfig& c = n.config;
  const double tp = c.sir_threshold / c.femto_power;
  const Point xb = x_b / n.length_scale;
  FemtoBoundsReport rep;
  rep.x_b = x_b;
  rep.v = v_bounds(tp * c.rho, c.pathloss_exponent, c.femto_radius);
  rep.c_u_prime = compute_Cu(tp, c.pathloss_exponent, xb).value;
  rep.r = r_min_max(xb, tp, c.pathloss_exponent, c.femto_radius);
  rep.r_min_valid = disk_inside_cell(xb, c.femto_radius);
  rep.conditions = femto_sufficient_conditions(x_b, cfg);
  rep.rho_star2 = rho_star2_bounds(x_b, cfg);
  if (with_exact) rep.exact = rho_star2_exact(x_b, cfg, spec);
  return rep;
}

}  // namespace femto
