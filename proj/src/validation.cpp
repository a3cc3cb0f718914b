#include "femto/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

#include "femto/analytic.hpp"
#include "femto/bounds.hpp"
#include "femto/oracles.hpp"
#include "femto/simulator.hpp"

namespace femto {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::size_t scaled(std::size_t n, const ValidationOptions& opt, std::size_t floor = 1000) {
  return std::max<std::size_t>(floor, static_cast<std::size_t>(std::llround(double(n) * opt.scale)));
}

SimSpec sim_spec(const ValidationOptions& opt, std::size_t trials) {
  SimSpec s;
  s.trials = trials;
  s.seed = opt.seed;
  s.threads = opt.threads;
  return s;
}

const Point kFemtoBs(0.0, 100.0);

// z with P(|Z| > z) = alpha.
double two_sided_z(double alpha) {
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// 1. Analytic outage inside the 95% CI of the simulation.
CriterionResult c1(const ValidationOptions& opt) {
  CriterionResult r{1, "analytic-simulation agreement", true, "", 0.0};
  std::vector<NetworkConfig> cfgs;
  for (double lam : {2.0, 4.0, 8.0}) {
    NetworkConfig c = reference_config();
    c.macro_ue_density = lam * kPerKm2;
    cfgs.push_back(c);
  }
  for (double mu : {2.0, 8.0}) {
    NetworkConfig c = reference_config();
    c.femto_bs_density = mu * kPerKm2;
    cfgs.push_back(c);
  }
  const std::size_t trials = scaled(20000, opt);
  const double widen = opt.familywise ? two_sided_z(0.05 / double(4 * cfgs.size())) / 1.96 : 1.0;
  int total = 0, inside = 0;
  double worst = 0.0;
  std::ostringstream misses;
  for (const auto& cfg : cfgs) {
    for (SimLevel level : {SimLevel::macro, SimLevel::femto}) {
      SimSpec spec = sim_spec(opt, trials);
      spec.level = level;
      spec.x_b = kFemtoBs;
      const auto samples = sample_trials(cfg, spec);
      for (Access a : {Access::open, Access::closed}) {
        const OutageEstimate e = outage_from_samples(samples, a, cfg.rho, cfg.sir_threshold, spec.seed);
        const OutageValue an = level == SimLevel::macro ? macro_outage(cfg, a) : femto_outage(kFemtoBs, cfg, a);
        const double dev = std::abs(an.probability - e.p_hat);
        const double band = widen * e.ci95_halfwidth;
        const bool ok = dev <= band + an.quad_error;
        ++total;
        inside += ok;
        worst = std::max(worst, dev / band);
        if (!ok)
          misses << " [" << to_string(level) << " " << to_string(a) << " lambda=" << cfg.macro_ue_density / kPerKm2
                 << " mu=" << cfg.femto_bs_density / kPerKm2 << ": analytic " << an.probability << " sim "
                 << e.p_hat << " +- " << band << "]";
      }
    }
  }
  r.passed = inside == total;
  r.detail = std::to_string(inside) + "/" + std::to_string(total) +
             (opt.familywise ? " inside the Bonferroni-adjusted band, " : " inside the 95% CI, ") +
             std::to_string(trials) + " trials, max |dev|/band " + fmt("%.2f", worst) + misses.str();
  return r;
}

// 2. Degenerate equivalence.
CriterionResult c2(const ValidationOptions&) {
  CriterionResult r{2, "degenerate equivalence", true, "", 0.0};
  double worst_macro = 0.0, worst_femto = 0.0;
  for (double lam : {2.0, 4.0, 8.0}) {
    NetworkConfig c = reference_config();
    c.macro_ue_density = lam * kPerKm2;
    c.femto_bs_density = 0.0;
    worst_macro = std::max(worst_macro, std::abs(macro_outage(c, Access::open).probability -
                                                 macro_outage(c, Access::closed).probability));
  }
  for (const Point& xb : {kFemtoBs, Point(200.0, 0.0), Point(-150.0, 250.0)}) {
    NetworkConfig c = reference_config();
    c.macro_ue_density = 0.0;
    worst_femto = std::max(worst_femto, std::abs(femto_outage(xb, c, Access::open).probability -
                                                 femto_outage(xb, c, Access::closed).probability));
  }
  r.passed = worst_macro < 1e-9 && worst_femto < 1e-9;
  r.detail = "mu=0 macro max |open-closed| " + fmt("%.3g", worst_macro) + ", lambda=0 femto " +
             fmt("%.3g", worst_femto) + " (tolerance 1e-9)";
  return r;
}

// 3. Laplace transforms equal 1 at s = 0 and do not increase in s.
CriterionResult c3(const ValidationOptions&) {
  CriterionResult r{3, "Laplace sanity", true, "", 0.0};
  const NetworkConfig cfg = reference_config();
  const double base = cfg.sir_threshold / cfg.macro_power;
  const std::vector<double> grid{0.0, 0.5 * base, base, 2.0 * base};
  const Point x0(150.0, 100.0);
  using Eval = std::function<LaplaceValue(double)>;
  const std::vector<std::pair<std::string, Eval>> evals{
      {"L0", [&](double s) { return eval_L0(s, cfg); }},
      {"L0'", [&](double s) { return eval_L0(s, cfg, {}, kFemtoBs); }},
      {"W", [&](double s) { return eval_W(s, x0, cfg); }},
      {"V", [&](double s) { return eval_V(s, x0, cfg); }},
      {"U", [&](double s) { return eval_U(s, x0, cfg); }},
      {"macro open", [&](double s) { return macro_laplace(s, cfg, Access::open); }},
      {"macro closed", [&](double s) { return macro_laplace(s, cfg, Access::closed); }},
      {"femto open", [&](double s) { return femto_laplace(s, kFemtoBs, cfg, Access::open); }},
      {"femto closed", [&](double s) { return femto_laplace(s, kFemtoBs, cfg, Access::closed); }},
  };
  std::ostringstream bad;
  double worst_at_zero = 0.0;
  for (const auto& [name, f] : evals) {
    std::vector<LaplaceValue> v;
    for (double s : grid) v.push_back(f(s));
    worst_at_zero = std::max(worst_at_zero, std::abs(v[0].value - 1.0));
    if (std::abs(v[0].value - 1.0) > 1e-12) bad << " " << name << "(0)=" << v[0].value;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      if (!(v[i + 1].value <= v[i].value + v[i].error + v[i + 1].error)) bad << " " << name << " increases";
      if (!(v[i].value > 0.0 && v[i].value <= 1.0 + 1e-12)) bad << " " << name << " outside (0,1]";
    }
  }
  r.passed = bad.str().empty();
  r.detail = std::to_string(evals.size()) + " evaluators on a 4-point s grid, max |L(0)-1| " +
             fmt("%.2g", worst_at_zero) + bad.str();
  return r;
}

// 4. Brute-force V inside the Lemma-1 sandwich.
CriterionResult c4(const ValidationOptions&) {
  CriterionResult r{4, "V sandwich", true, "", 0.0};
  std::vector<std::tuple<double, double, double>> grid;
  for (double g : {2.5, 3.0, 4.0})
    for (double t : {0.1, 1.0, 10.0}) grid.emplace_back(g, t, 0.1);
  for (double t : {0.1, 1.0, 10.0}) grid.emplace_back(3.0, t, 0.05);
  int ok = 0;
  double lo_ratio = 1e300, hi_ratio = 0.0;
  std::ostringstream bad;
  for (const auto& [g, t, R] : grid) {
    const VBounds vb = v_bounds(t, g, R);
    const double v = oracle::v_plane_bruteforce(t, g, R);
    const bool in = vb.v_min <= v && v <= vb.v_max && vb.v_max == 2.0 * vb.v_min;
    ok += in;
    lo_ratio = std::min(lo_ratio, v / vb.v_max);
    hi_ratio = std::max(hi_ratio, v / vb.v_max);
    if (!in) bad << " [gamma=" << g << " t=" << t << " R=" << R << "]";
  }
  r.passed = ok == int(grid.size());
  r.detail = std::to_string(ok) + "/" + std::to_string(grid.size()) + " inside, V/V_max in [" +
             fmt("%.4f", lo_ratio) + ", " + fmt("%.4f", hi_ratio) + "], V_max = 2 V_min" + bad.str();
  return r;
}

std::string rho_triplet(double a, double b, double c) {
  return fmt("%.4g", a) + " <= " + fmt("%.4g", b) + " <= " + fmt("%.4g", c);
}

// 5 and 6. rho* between its closed-form bounds, analytic and simulated.
CriterionResult rho_star_criterion(int id, PowerModel power, const ValidationOptions& opt) {
  CriterionResult r{id, power == PowerModel::fixed ? "rho* sandwich" : "rho* sandwich, random power", true, "",
                    0.0};
  std::ostringstream d;
  const std::size_t trials = scaled(20000, opt);
  for (double R : {25.0, 50.0, 75.0}) {
    const NetworkConfig cfg = threshold_study_config(R);
    const RhoBounds b = rho_star_bounds(cfg);
    bool ok = true;
    d << "R=" << R << ":";
    if (power == PowerModel::fixed) {
      const RootResult e = rho_star_exact(cfg);
      const bool in = e.status == RootStatus::found && b.rho_min <= e.rho && e.rho <= b.rho_max;
      ok = ok && in;
      d << " exact " << rho_triplet(b.rho_min, e.rho, b.rho_max) << (in ? "" : " FAIL") << ";";
    }
    SimSpec spec = sim_spec(opt, trials);
    spec.power_model = power;
    const CrossingEstimate s = estimate_rho_star_sim(cfg, spec);
    const bool in = s.found && (opt.familywise ? s.lo <= b.rho_max && b.rho_min <= s.hi
                                               : b.rho_min <= s.rho && s.rho <= b.rho_max);
    ok = ok && in;
    d << " sim " << rho_triplet(b.rho_min, s.rho, b.rho_max) << " (95% " << fmt("%.4g", s.lo) << ".."
      << fmt("%.4g", s.hi) << ")" << (in ? "" : " FAIL") << "; ";
    r.passed = r.passed && ok;
  }
  r.detail = d.str() + std::to_string(trials) + " trials";
  return r;
}

// 7. rho** between its bounds and non-decreasing along x_B.
CriterionResult c7(const ValidationOptions&) {
  CriterionResult r{7, "rho** sandwich", true, "", 0.0};
  std::ostringstream d;
  auto check = [&](const Point& xb, const NetworkConfig& cfg) {
    const Rho2Bounds b = rho_star2_bounds(xb, cfg);
    const RootResult e = rho_star2_exact(xb, cfg);
    const bool in = b.rho_min.found && b.rho_max.found && e.status == RootStatus::found &&
                    b.rho_min.rho <= e.rho && e.rho <= b.rho_max.rho;
    r.passed = r.passed && in;
    d << rho_triplet(b.rho_min.rho, e.rho, b.rho_max.rho) << (in ? "" : " FAIL") << "; ";
    return e.rho;
  };
  for (double R : {25.0, 50.0, 75.0}) {
    d << "R=" << R << " x_B=(0,100): ";
    check(kFemtoBs, threshold_study_config(R));
  }
  std::vector<double> sweep;
  for (double x : {50.0, 150.0, 250.0, 350.0}) {
    d << "x=" << x << ": ";
    sweep.push_back(check(Point(x, 0.0), threshold_study_config(50.0)));
  }
  int violations = 0;
  for (std::size_t i = 0; i + 1 < sweep.size(); ++i)
    if (sweep[i + 1] < sweep[i] * (1.0 - 1e-3)) ++violations;
  r.passed = r.passed && violations <= 1;
  d << "x_B sweep decreases " << violations << " time(s)";
  r.detail = d.str();
  return r;
}

// 8. rho*_min R^gamma and rho*_max R^gamma constant at fixed nu_bar, lambda_bar.
CriterionResult c8(const ValidationOptions&) {
  CriterionResult r{8, "bound scaling in R", true, "", 0.0};
  const NetworkConfig base = normalize(threshold_study_config(50.0)).config;
  const DerivedQuantities dq = derived_quantities(base);
  const double g = base.pathloss_exponent;
  std::vector<double> pmin, pmax;
  for (double R : {0.02, 0.05, 0.1}) {
    NetworkConfig c = base;
    const double area = kPi * R * R;
    c.femto_radius = R;
    c.macro_ue_density = dq.lambda_bar / area;
    c.femto_ue_profile = IntensityProfile<double>::constant(dq.nu_bar / area, R);
    const RhoBounds b = rho_star_bounds(c);
    pmin.push_back(b.rho_min * std::pow(R, g));
    pmax.push_back(b.rho_max * std::pow(R, g));
  }
  double spread = 0.0;
  for (std::size_t i = 1; i < pmin.size(); ++i)
    spread = std::max({spread, std::abs(pmin[i] / pmin[0] - 1.0), std::abs(pmax[i] / pmax[0] - 1.0)});
  r.passed = spread <= 1e-9;
  r.detail = "max relative spread " + fmt("%.3g", spread) + " (tolerance 1e-9), rho_min R^g = " +
             fmt("%.6g", pmin[0]) + ", rho_max R^g = " + fmt("%.6g", pmax[0]);
  return r;
}

// 9. Every positive certificate agrees with the analytic comparison.
CriterionResult c9(const ValidationOptions& opt) {
  CriterionResult r{9, "sufficient-condition soundness", true, "", 0.0};
  std::mt19937_64 rng(opt.seed * 0x9E3779B97F4A7C15ULL + 9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto uni = [&](double a, double b) { return a + (b - a) * u(rng); };
  const int n_configs = std::max(10, int(std::lround(60.0 * opt.scale)));
  int macro_cert = 0, femto_cert = 0, counter = 0;
  std::ostringstream bad;
  for (int i = 0; i < n_configs; ++i) {
    NetworkConfig c = reference_config();
    c.femto_radius = uni(10.0, 100.0);
    c.pathloss_exponent = uni(2.5, 4.0);
    c.sir_threshold = std::exp(uni(std::log(0.03), 0.0));
    c.macro_ue_density = uni(0.5, 10.0) * kPerKm2;
    c.femto_bs_density = uni(0.5, 10.0) * kPerKm2;
    c.femto_ue_profile = IntensityProfile<double>::constant(uni(0.0, 100.0) * kPerKm2, c.femto_radius);
    c.femto_power = c.macro_power * std::pow(10.0, uni(0.0, 1.0));
    c.rho = std::pow(10.0, uni(-1.0, 4.0));
    const Point xb = sample_uniform_hexagon(rng, c.grid());

    const SufficientConditions m = macro_sufficient_conditions(c);
    if (m.verdict == Certificate::open_better || m.verdict == Certificate::closed_better) {
      ++macro_cert;
      const OutageValue diff = AccessComparator(c, Level::macro).difference(c.rho);
      const double sign = m.verdict == Certificate::open_better ? 1.0 : -1.0;
      if (sign * diff.probability > diff.quad_error) {
        ++counter;
        bad << " [macro config " << i << ": " << to_string(m.verdict) << ", difference " << diff.probability << "]";
      }
    }
    const FemtoConditions f = femto_sufficient_conditions(xb, c);
    if (f.verdict == Certificate::open_better || f.verdict == Certificate::closed_better) {
      ++femto_cert;
      const OutageValue diff = AccessComparator(c, Level::femto, xb).difference(c.rho);
      const double sign = f.verdict == Certificate::open_better ? 1.0 : -1.0;
      if (sign * diff.probability > diff.quad_error) {
        ++counter;
        bad << " [femto config " << i << ": " << to_string(f.verdict) << ", difference " << diff.probability << "]";
      }
    }
  }
  r.passed = counter == 0;
  r.detail = std::to_string(n_configs) + " configs, " + std::to_string(macro_cert) + " macro and " +
             std::to_string(femto_cert) + " femto certificates, " + std::to_string(counter) + " counterexamples" +
             bad.str();
  return r;
}

// 10. Factored Laplace transform against the direct average over realizations.
CriterionResult c10(const ValidationOptions& opt) {
  CriterionResult r{10, "conditioning identity", true, "", 0.0};
  const NetworkConfig cfg = reference_config();
  const double s = cfg.sir_threshold / cfg.macro_power;
  const SimSpec spec = sim_spec(opt, scaled(100000, opt, 10000));
  const auto samples = sample_trials(cfg, spec);
  std::ostringstream d;
  for (Access a : {Access::open, Access::closed}) {
    double sum = 0.0, sum2 = 0.0;
    for (const auto& t : samples) {
      const double v = std::exp(-s * cfg.macro_power * t.interference(a, cfg.rho));
      sum += v;
      sum2 += v * v;
    }
    const double n = double(samples.size());
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / (n - 1.0));
    const LaplaceValue an = macro_laplace(s, cfg, a);
    const double z = std::abs(an.value - mean) / se;
    const bool ok = std::abs(an.value - mean) <= 3.0 * se + an.error;
    r.passed = r.passed && ok;
    d << to_string(a) << ": factored " << fmt("%.5f", an.value) << " direct " << fmt("%.5f", mean) << " +- "
      << fmt("%.5f", se) << " (" << fmt("%.2f", z) << " SE)" << (ok ? "" : " FAIL") << "; ";
  }
  r.detail = d.str() + std::to_string(spec.trials) + " realizations";
  return r;
}

// 11. Normalization invariance.
CriterionResult c11(const ValidationOptions&) {
  CriterionResult r{11, "normalization invariance", true, "", 0.0};
  const QuadratureSpec qs;
  const NetworkConfig cfg = reference_config();
  const NormalizedConfig n = normalize(cfg);
  const Point xb_n = kFemtoBs / n.length_scale;
  double worst = 0.0;
  for (Access a : {Access::open, Access::closed}) {
    const double pairs[2][2] = {
        {macro_outage(cfg, a, qs).probability, macro_outage(n.config, a, qs).probability},
        {femto_outage(kFemtoBs, cfg, a, qs).probability, femto_outage(xb_n, n.config, a, qs).probability}};
    for (const auto& p : pairs) {
      const double tol = 10.0 * std::max(qs.abs_tol, qs.rel_tol * std::abs(p[0]));
      worst = std::max(worst, std::abs(p[0] - p[1]) / tol);
    }
  }
  r.passed = worst <= 1.0;
  r.detail = "macro and femto, both modes: max |physical - normalized| = " + fmt("%.3g", worst) +
             " x (10 x quadrature tolerance)";
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const ValidationOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = c1(opt); break;
      case 2: r = c2(opt); break;
      case 3: r = c3(opt); break;
      case 4: r = c4(opt); break;
      case 5: r = rho_star_criterion(5, PowerModel::fixed, opt); break;
      case 6: r = rho_star_criterion(6, PowerModel::random4, opt); break;
      case 7: r = c7(opt); break;
      case 8: r = c8(opt); break;
      case 9: r = c9(opt); break;
      case 10: r = c10(opt); break;
      case 11: r = c11(opt); break;
      default: throw std::invalid_argument("no criterion " + std::to_string(id));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    r.id = id;
    r.name = "criterion " + std::to_string(id);
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<CriterionResult> run_acceptance(const ValidationOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> ids = opt.only;
  if (ids.empty())
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, opt));
    if (on_result) on_result(out.back());
  }
  return out;
}

CriterionResult check_config(const NetworkConfig& cfg, std::size_t trials, std::uint64_t seed, unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r{0, "config outage vs simulation", true, "", 0.0};
  cfg.validate();
  const Point xb(0.0, 0.2 * cfg.cell_radius);
  std::ostringstream d;
  for (SimLevel level : {SimLevel::macro, SimLevel::femto}) {
    SimSpec spec;
    spec.trials = trials;
    spec.seed = seed;
    spec.threads = threads;
    spec.level = level;
    spec.x_b = xb;
    const auto samples = sample_trials(cfg, spec);
    for (Access a : {Access::open, Access::closed}) {
      const OutageEstimate e = outage_from_samples(samples, a, cfg.rho, cfg.sir_threshold, seed);
      const OutageValue an = level == SimLevel::macro ? macro_outage(cfg, a) : femto_outage(xb, cfg, a);
      const double se = std::sqrt(e.p_hat * (1.0 - e.p_hat) / double(e.trials));
      const bool ok = std::abs(an.probability - e.p_hat) <= 3.0 * se + an.quad_error;
      r.passed = r.passed && ok;
      d << to_string(level) << " " << to_string(a) << " " << fmt("%.4f", an.probability) << " vs "
        << fmt("%.4f", e.p_hat) << (ok ? "" : " FAIL") << "; ";
    }
  }
  r.detail = d.str() + std::to_string(trials) + " trials, tolerance 3 SE";
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.name << ": " << r.detail << " ("
     << fmt("%.1f", r.seconds) << " s)";
  return os.str();
}

}  // namespace femto
