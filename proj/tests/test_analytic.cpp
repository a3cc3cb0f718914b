#include <doctest.h>

#include <cmath>

#include "femto/analytic.hpp"
#include "femto/oracles.hpp"
#include "femto/simulator.hpp"

using namespace femto;

namespace {

NetworkConfig no_femtocells() {
  NetworkConfig c = reference_config();
  c.femto_bs_density = 0.0;
  return c;
}

}  // namespace

TEST_SUITE("analytic") {
  TEST_CASE("every evaluator is 1 at s = 0") {
    const NetworkConfig cfg = reference_config();
    const Point x0(150.0, 100.0), xb(0.0, 100.0);
    CHECK(eval_L0(0.0, cfg).value == 1.0);
    CHECK(eval_W(0.0, x0, cfg).value == 1.0);
    CHECK(eval_V(0.0, x0, cfg).value == 1.0);
    CHECK(eval_U(0.0, x0, cfg).value == 1.0);
    for (Access a : {Access::open, Access::closed}) {
      CHECK(macro_laplace(0.0, cfg, a).value == 1.0);
      CHECK(femto_laplace(0.0, xb, cfg, a).value == 1.0);
    }
  }

  TEST_CASE("empty processes give no interference") {
    NetworkConfig cfg = reference_config();
    const double s = cfg.sir_threshold / cfg.macro_power;
    const Point x0(150.0, 100.0);
    cfg.macro_ue_density = 0.0;
    CHECK(eval_L0(s, cfg).value == 1.0);
    CHECK(eval_V(s, x0, cfg).value == 1.0);
    CHECK(eval_U(s, x0, cfg).value == 1.0);
    cfg.femto_ue_profile = IntensityProfile<double>::constant(0.0, cfg.femto_radius);
    CHECK(eval_W(s, x0, cfg).value == 1.0);
    cfg.femto_bs_density = 0.0;
    CHECK(macro_outage(cfg, Access::open).probability == 0.0);
    CHECK(macro_outage(cfg, Access::closed).probability == 0.0);
    CHECK(femto_laplace(s, Point(0.0, 100.0), cfg, Access::open).value == 1.0);
    CHECK(femto_outage_avg(cfg, Access::closed).probability == doctest::Approx(0.0));
  }

  TEST_CASE("W, V and U against fixed-grid quadrature") {
    const NetworkConfig cfg = reference_config();
    const double s = cfg.sir_threshold / cfg.macro_power;
    for (const Point& x0 : {Point(150.0, 100.0), Point(0.3 * 500.0, 0.2 * 500.0), Point(60.0, -20.0)}) {
      CAPTURE(x0.transpose());
      CHECK(-std::log(eval_W(s, x0, cfg).value) == doctest::Approx(oracle::w_exponent(s, x0, cfg)).epsilon(1e-6));
      CHECK(-std::log(eval_V(s, x0, cfg).value) == doctest::Approx(oracle::v_exponent(s, x0, cfg)).epsilon(1e-6));
      CHECK(-std::log(eval_U(s, x0, cfg).value) == doctest::Approx(oracle::u_exponent(s, x0, cfg)).epsilon(1e-6));
    }
    // Femto-level victim.
    const Point xb(0.0, 100.0), x0(120.0, 40.0);
    const double sq = cfg.sir_threshold / cfg.femto_power;
    CHECK(eval_U(sq, x0, cfg, {}, xb).value == doctest::Approx(std::exp(-oracle::u_exponent(sq, x0, cfg, xb))));
  }

  TEST_CASE("V and U coincide for a femtocell centred on a macro BS") {
    // Every UE in B(x0, R) is then served by x0 under either access mode.
    NetworkConfig cfg = reference_config();
    cfg.rho = 1.0;
    cfg.femto_radius = 50.0;
    cfg.femto_ue_profile = IntensityProfile<double>::constant(0.0, 50.0);
    const Point x0(750.0, 500.0 * std::sqrt(3.0) / 2.0);
    const double s = cfg.sir_threshold / cfg.macro_power;
    const double v = -std::log(eval_V(s, x0, cfg).value), u = -std::log(eval_U(s, x0, cfg).value);
    CHECK(v > 0.0);
    CHECK(u / v == doctest::Approx(1.0).epsilon(1e-5));
  }

  TEST_CASE("L0 against a Monte Carlo average of exp(-s I)") {
    const NetworkConfig cfg = no_femtocells();
    const double s = cfg.sir_threshold / cfg.macro_power;
    SimSpec spec;
    spec.trials = 100000;
    spec.seed = 7;
    const LaplaceEstimate mc = estimate_laplace_direct(cfg, s, spec);
    const LaplaceValue an = eval_L0(s, cfg);
    CHECK(std::abs(an.value - mc.mean) < 2e-3);
    CHECK(std::abs(an.value - mc.mean) < 3.0 * mc.std_error);
  }

  TEST_CASE("without femtocells both access modes reduce to L0") {
    const NetworkConfig cfg = no_femtocells();
    const double s = cfg.sir_threshold / cfg.macro_power;
    const double l0 = eval_L0(s, cfg).value;
    CHECK(macro_laplace(s, cfg, Access::open).value == doctest::Approx(l0).epsilon(1e-14));
    CHECK(macro_laplace(s, cfg, Access::closed).value == doctest::Approx(l0).epsilon(1e-14));
  }

  TEST_CASE("outage vanishes as T goes to 0") {
    NetworkConfig cfg = reference_config();
    cfg.sir_threshold = 1e-9;
    CHECK(macro_outage(cfg, Access::open).probability < 1e-5);
    CHECK(femto_outage(Point(0.0, 100.0), cfg, Access::closed).probability < 1e-5);
  }

  TEST_CASE("Laplace transforms decrease in s") {
    const NetworkConfig cfg = reference_config();
    const double base = cfg.sir_threshold / cfg.macro_power;
    for (Access a : {Access::open, Access::closed}) {
      double prev = 1.0;
      for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const LaplaceValue v = macro_laplace(f * base, cfg, a);
        CHECK(v.value > 0.0);
        CHECK(v.value <= prev + v.error);
        prev = v.value;
      }
    }
  }

  TEST_CASE("open and closed agree for a vanishing femtocell at rho = 1 without local UEs") {
    NetworkConfig cfg = reference_config();
    cfg.rho = 1.0;
    cfg.femto_radius = 0.5;  // 1e-3 R_c
    cfg.femto_ue_profile = IntensityProfile<double>::constant(0.0, 0.5);
    const OutageValue o = macro_outage(cfg, Access::open), c = macro_outage(cfg, Access::closed);
    CHECK(std::abs(o.probability - c.probability) < 1e-6 + o.quad_error + c.quad_error);
  }

  TEST_CASE("normalization invariance") {
    NetworkConfig cfg = reference_config();
    cfg.pathloss_exponent = 3.5;
    cfg.femto_ue_profile = IntensityProfile<double>({{20.0, 2e-4}, {50.0, 5e-5}});
    const NormalizedConfig n = normalize(cfg);
    const QuadratureSpec qs;
    const Point xb(-120.0, 60.0);
    for (Access a : {Access::open, Access::closed}) {
      const double tol = 10.0 * qs.abs_tol;
      CHECK(std::abs(macro_outage(cfg, a).probability - macro_outage(n.config, a).probability) <=
            tol + 10.0 * qs.rel_tol * macro_outage(cfg, a).probability);
      const double pf = femto_outage(xb, cfg, a).probability;
      CHECK(std::abs(pf - femto_outage(xb / n.length_scale, n.config, a).probability) <= tol + 10.0 * qs.rel_tol * pf);
    }
  }

  TEST_CASE("far field does not depend on the truncation radius") {
    // Large rho R^gamma: the field exponent has a sizeable second-order
    // contribution beyond the default truncation radius.
    NetworkConfig cfg = reference_config();
    cfg.femto_radius = 98.57;
    cfg.femto_ue_profile = IntensityProfile<double>::constant(6.85e-6, 98.57);
    cfg.pathloss_exponent = 3.42;
    cfg.sir_threshold = 0.66;
    cfg.rho = 5474.0;
    cfg.femto_power = 2.114 * cfg.macro_power;
    const double s = cfg.sir_threshold / cfg.macro_power;
    QuadratureSpec a, b;
    a.truncation_radius = 4.0;
    b.truncation_radius = 16.0;
    for (Access acc : {Access::open, Access::closed}) {
      const LaplaceValue va = macro_laplace(s, cfg, acc, a), vb = macro_laplace(s, cfg, acc, b);
      CHECK(std::abs(va.value - vb.value) <= va.error + vb.error);
      CHECK(va.error < 1e-5);
    }
  }

  TEST_CASE("femto outage at the reference point") {
    const NetworkConfig cfg = reference_config();
    const Point xb(0.0, 100.0);
    const OutageValue o = femto_outage(xb, cfg, Access::open), c = femto_outage(xb, cfg, Access::closed);
    CHECK(o.probability > 0.0);
    CHECK(o.probability < c.probability);
    CHECK(o.quad_error < 1e-4);
  }

  TEST_CASE("average_over_hexagon") {
    const HexGrid<double> g(2.0);
    CHECK(average_over_hexagon([](const Point&) { return 0.7; }, g, 6).value == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(average_over_hexagon([](const Point&) { return 0.7; }, g, 6, true).value ==
          doctest::Approx(0.7).epsilon(1e-14));
    auto r2 = [](const Point& p) { return p.squaredNorm(); };
    const double exact = oracle::hexagon_mean(r2, 2.0);
    CHECK(average_over_hexagon(r2, g, 8).value == doctest::Approx(exact).epsilon(1e-12));
    CHECK(average_over_hexagon(r2, g, 8, true).value == doctest::Approx(exact).epsilon(1e-12));
  }

  TEST_CASE("AccessComparator matches the direct evaluators") {
    const NetworkConfig cfg = reference_config();
    const AccessComparator cmp(cfg, Level::macro);
    for (double rho : {1.0, 10.0, 1000.0}) {
      NetworkConfig c = cfg;
      c.rho = rho;
      CHECK(cmp.outage(Access::open, rho).probability ==
            doctest::Approx(macro_outage(c, Access::open).probability).epsilon(1e-12));
    }
    CHECK(cmp.outage(Access::closed, 5.0).probability ==
          doctest::Approx(macro_outage(cfg, Access::closed).probability).epsilon(1e-12));
  }

  TEST_CASE("invalid input") {
    NetworkConfig cfg = reference_config();
    CHECK_THROWS_AS(eval_L0(-1.0, cfg), DomainError);
    cfg.pathloss_exponent = 2.0;
    CHECK_THROWS_AS(macro_outage(cfg, Access::open), DomainError);
    QuadratureSpec qs;
    qs.truncation_radius = 2.0;
    CHECK_THROWS_AS(macro_outage(reference_config(), Access::open, qs), DomainError);
    CHECK_THROWS_AS(kernel_kappa(1.9), DomainError);
  }
}
