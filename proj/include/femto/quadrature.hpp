#pragma once

// One-dimensional adaptive Gauss-Kronrod integration and fixed
// Gauss-Legendre rules. Multi-dimensional integrals in this library are
// built by nesting these.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace femto {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
  }
};

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
  int max_intervals = 400;
};

namespace detail {

struct Gk15Segment {
  double a, b, value, error;
};

inline constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                  0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// QUADPACK qk15 rule with its error heuristic.
template <typename F>
Gk15Segment gk15(F& f, double a, double b) {
  const auto& xgk = kXgk;
  const auto& wgk = kWgk;
  const auto& wg = kWg;
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  double fv1[7], fv2[7];
  const double fc = f(centr);
  double resg = fc * wg[3];
  double resk = fc * wgk[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * xgk[jtw];
    const double f1 = f(centr - absc), f2 = f(centr + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += wg[j] * (f1 + f2);
    resk += wgk[jtw] * (f1 + f2);
    resabs += wgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * xgk[jtwm1];
    const double f1 = f(centr - absc), f2 = f(centr + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += wgk[jtwm1] * (f1 + f2);
    resabs += wgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  const double reskh = resk * 0.5;
  double resasc = wgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  const double result = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double abserr = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0) abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * epmach)) abserr = std::max(epmach * 50.0 * resabs, abserr);
  return {a, b, result, abserr};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration over the pieces delimited by
/// `breakpoints` (sorted, at least two entries). The interval with the
/// largest error estimate is bisected until the summed error falls below
/// max(tol.abs, tol.rel * |value|) or tol.max_intervals is reached.
template <typename F>
QuadResult integrate(F&& f, std::span<const double> breakpoints, Tolerance tol = {}) {
  std::vector<detail::Gk15Segment> segs;
  segs.reserve(static_cast<std::size_t>(tol.max_intervals) + breakpoints.size());
  QuadResult out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    segs.push_back(detail::gk15(f, breakpoints[i], breakpoints[i + 1]));
    out.evaluations += 15;
  }
  auto totals = [&] {
    double v = 0.0, e = 0.0;
    for (const auto& s : segs) {
      v += s.value;
      e += s.error;
    }
    return std::pair{v, e};
  };
  auto [value, error] = totals();
  while (error > std::max(tol.abs, tol.rel * std::abs(value))) {
    if (static_cast<int>(segs.size()) >= tol.max_intervals) {
      out.converged = false;
      break;
    }
    auto worst = std::max_element(segs.begin(), segs.end(),
                                  [](const auto& l, const auto& r) { return l.error < r.error; });
    const double a = worst->a, b = worst->b, m = 0.5 * (a + b);
    if (!(m > std::min(a, b) && m < std::max(a, b))) {
      out.converged = false;
      break;
    }
    *worst = detail::gk15(f, a, m);
    segs.push_back(detail::gk15(f, m, b));
    out.evaluations += 30;
    std::tie(value, error) = totals();
  }
  out.value = value;
  out.error = error;
  return out;
}

template <typename F>
QuadResult integrate(F&& f, double a, double b, Tolerance tol = {}) {
  const double bp[2] = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(bp, 2), tol);
}

/// Nodes of a fixed composite 15-point Kronrod rule with the weights of the
/// embedded 7-point Gauss rule (zero on Kronrod-only nodes), for product
/// rules that need an error estimate without adaptivity.
struct KronrodNodes {
  std::vector<double> x;
  std::vector<double> wk;
  std::vector<double> wg;
};

inline KronrodNodes kronrod_nodes(std::span<const double> breakpoints) {
  KronrodNodes out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i], b = breakpoints[i + 1];
    if (!(b > a)) continue;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int j = 0; j < 15; ++j) {
      const int k = j < 7 ? j : 14 - j;
      const double sign = j < 7 ? -1.0 : 1.0;
      out.x.push_back(c + sign * h * detail::kXgk[k]);
      out.wk.push_back(h * detail::kWgk[k]);
      out.wg.push_back(k % 2 == 1 ? h * detail::kWg[k / 2] : (k == 7 ? h * detail::kWg[3] : 0.0));
    }
  }
  return out;
}

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

/// Composite Gauss-Legendre sum of f over [a, b] split into `panels` equal panels.
template <typename F>
double composite_gauss(F&& f, double a, double b, int panels, int order) {
  const GaussRule& g = gauss_legendre(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double c = lo + 0.5 * h;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) sum += g.weights[i] * f(c + 0.5 * h * g.nodes[i]);
  }
  return sum * 0.5 * h;
}

}  // namespace femto
