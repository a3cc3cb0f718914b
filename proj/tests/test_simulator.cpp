#include <doctest.h>

#include <cmath>

#include "femto/analytic.hpp"
#include "femto/errors.hpp"
#include "femto/simulator.hpp"

using namespace femto;

namespace {

SimSpec small(std::size_t trials, std::uint64_t seed = 3) {
  SimSpec s;
  s.trials = trials;
  s.seed = seed;
  return s;
}

bool same(const std::vector<TrialSample>& a, const std::vector<TrialSample>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].signal != b[i].signal || a[i].closed != b[i].closed || a[i].open_base != b[i].open_base ||
        a[i].open_rho != b[i].open_rho)
      return false;
  return true;
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("counter rng replays and splits") {
    CounterRng a(5, 17), b(5, 17), c(5, 18);
    for (int i = 0; i < 10; ++i) CHECK(a() == b());
    CHECK(a() != c());
    const CounterRng p(9, 1);
    CounterRng s1 = p.split(2), s2 = p.split(2), s3 = p.split(3);
    CHECK(s1() == s2());
    CHECK(s1() != s3());
    CHECK(p.counter() == 0);
    double mean = 0.0;
    CounterRng u(1, 1);
    for (int i = 0; i < 100000; ++i) {
      const double x = u.uniform();
      REQUIRE(x >= 0.0);
      REQUIRE(x < 1.0);
      mean += x;
    }
    CHECK(mean / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("no interferers means no outage") {
    NetworkConfig cfg = reference_config();
    cfg.macro_ue_density = 0.0;
    cfg.femto_bs_density = 0.0;
    cfg.femto_ue_profile = IntensityProfile<double>::constant(0.0, cfg.femto_radius);
    for (SimLevel lvl : {SimLevel::macro, SimLevel::femto, SimLevel::femto_avg})
      for (Access a : {Access::open, Access::closed}) {
        SimSpec s = small(500);
        s.level = lvl;
        s.access = a;
        s.x_b = Point(0.0, 100.0);
        const auto e = estimate_outage(cfg, s);
        CHECK(e.p_hat == 0.0);
        CHECK(e.ci95_halfwidth == 0.0);
        CHECK(e.trials == 500);
      }
    SimSpec one = small(1);
    CHECK(estimate_outage(cfg, one).p_hat == 0.0);
  }

  TEST_CASE("a huge threshold is almost always outage") {
    NetworkConfig cfg = reference_config();
    cfg.sir_threshold = 1e6;
    SimSpec s = small(2000);
    CHECK(estimate_outage(cfg, s).p_hat > 0.99);
  }

  TEST_CASE("closed access does not depend on rho") {
    const NetworkConfig cfg = reference_config();
    SimSpec s = small(3000);
    const auto samples = sample_trials(cfg, s);
    const double p = outage_from_samples(samples, Access::closed, 1.0, cfg.sir_threshold).p_hat;
    for (double rho : {1e-3, 10.0, 1e4})
      CHECK(outage_from_samples(samples, Access::closed, rho, cfg.sir_threshold).p_hat == p);
  }

  TEST_CASE("open-access outage is nondecreasing in rho on shared samples") {
    const NetworkConfig cfg = reference_config();
    const auto samples = sample_trials(cfg, small(3000));
    double prev = 0.0;
    for (double rho : {0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}) {
      const double p = outage_from_samples(samples, Access::open, rho, cfg.sir_threshold).p_hat;
      CHECK(p >= prev);
      prev = p;
    }
  }

  TEST_CASE("deterministic for a seed and any thread count") {
    const NetworkConfig cfg = reference_config();
    SimSpec s = small(800, 11);
    s.threads = 1;
    const auto a = sample_trials(cfg, s);
    s.threads = 3;
    const auto b = sample_trials(cfg, s);
    CHECK(same(a, b));
    s.seed = 12;
    CHECK_FALSE(same(a, sample_trials(cfg, s)));
    s.level = SimLevel::femto;
    s.x_b = Point(0.0, 100.0);
    s.threads = 1;
    const auto c = sample_trials(cfg, s);
    s.threads = 4;
    CHECK(same(c, sample_trials(cfg, s)));
  }

  TEST_CASE("trials are independent of the total count") {
    const NetworkConfig cfg = reference_config();
    const auto a = sample_trials(cfg, small(200));
    const auto b = sample_trials(cfg, small(400));
    CHECK(same(a, std::vector<TrialSample>(b.begin(), b.begin() + 200)));
  }

  TEST_CASE("confidence interval is the binomial normal approximation") {
    std::vector<TrialSample> samples(400);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i].signal = 1.0;
      samples[i].closed = i % 4 == 0 ? 10.0 : 0.0;
    }
    const auto e = outage_from_samples(samples, Access::closed, 1.0, 1.0, 42);
    CHECK(e.p_hat == doctest::Approx(0.25));
    CHECK(e.ci95_halfwidth == doctest::Approx(1.96 * std::sqrt(0.25 * 0.75 / 400.0)));
    CHECK(e.seed == 42);
    CHECK(outage_from_samples({}, Access::open, 1.0, 1.0).trials == 0);
  }

  TEST_CASE("doubling the trials shrinks the interval by about sqrt 2") {
    const NetworkConfig cfg = reference_config();
    const auto a = estimate_outage(cfg, small(4000));
    const auto b = estimate_outage(cfg, small(16000));
    REQUIRE(a.p_hat > 0.05);
    CHECK(a.ci95_halfwidth / b.ci95_halfwidth == doctest::Approx(2.0).epsilon(0.15));
  }

  TEST_CASE("window size does not change the estimate beyond its noise") {
    const NetworkConfig cfg = reference_config();
    SimSpec s6 = small(20000, 21), s9 = small(20000, 22);
    s9.window_radius = 9.0;
    for (Access a : {Access::open, Access::closed}) {
      s6.access = s9.access = a;
      const auto e6 = estimate_outage(cfg, s6), e9 = estimate_outage(cfg, s9);
      CHECK(std::abs(e6.p_hat - e9.p_hat) < 1.5 * (e6.ci95_halfwidth + e9.ci95_halfwidth));
    }
  }

  TEST_CASE("rho = 1 with vanishing femtocells makes the modes agree") {
    NetworkConfig cfg = reference_config();
    cfg.femto_radius = 1e-6;
    cfg.femto_ue_profile = IntensityProfile<double>::constant(0.0, cfg.femto_radius);
    cfg.rho = 1.0;
    const auto samples = sample_trials(cfg, small(2000));
    std::size_t differ = 0;
    for (const auto& t : samples)
      differ += t.outage(Access::open, 1.0, cfg.sir_threshold) != t.outage(Access::closed, 1.0, cfg.sir_threshold);
    CHECK(differ == 0);
  }

  TEST_CASE("outage grows with the macro UE density") {
    NetworkConfig cfg = reference_config();
    double prev = -1.0;
    for (double lam : {1.0, 4.0, 16.0}) {
      cfg.macro_ue_density = lam * kPerKm2;
      const double p = estimate_outage(cfg, small(6000)).p_hat;
      CHECK(p > prev);
      prev = p;
    }
  }

  TEST_CASE("agrees with the analytic macro outage") {
    const NetworkConfig cfg = reference_config();
    for (Access a : {Access::open, Access::closed}) {
      SimSpec s = small(40000, 5);
      s.access = a;
      const auto e = estimate_outage(cfg, s);
      const double p = macro_outage(cfg, a).probability;
      CHECK(std::abs(e.p_hat - p) < 3.0 * std::sqrt(p * (1.0 - p) / double(s.trials)) + 1e-4);
    }
  }

  TEST_CASE("random4 power levels raise the mean interference") {
    const NetworkConfig cfg = reference_config();
    SimSpec s = small(4000);
    s.far_field = false;
    const auto fixed = sample_trials(cfg, s);
    s.power_model = PowerModel::random4;
    const auto random = sample_trials(cfg, s);
    double mf = 0.0, mr = 0.0;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
      mf += fixed[i].closed;
      mr += random[i].closed;
    }
    CHECK(mr > mf);
  }

  TEST_CASE("crossing from synthetic samples") {
    // Open interference rho * 1, closed 5: the outage flips near rho = 5.
    std::vector<TrialSample> samples(1000);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      samples[i].signal = 0.5 + double(i) / 1000.0;
      samples[i].closed = 5.0;
      samples[i].open_rho = 1.0;
    }
    const auto c = rho_crossing_from_samples(samples, 0.2);
    REQUIRE(c.found);
    CHECK(c.rho == doctest::Approx(5.0).epsilon(0.01));
    CHECK(c.lo <= c.rho);
    CHECK(c.hi >= c.rho);

    std::vector<TrialSample> flat(100);
    for (auto& t : flat) t.signal = 1.0;
    const auto none = rho_crossing_from_samples(flat, 1.0);
    CHECK_FALSE(none.found);
    CHECK_FALSE(none.note.empty());
    CHECK_FALSE(rho_crossing_from_samples({}, 1.0).found);
  }

  TEST_CASE("invalid specifications") {
    const NetworkConfig cfg = reference_config();
    SimSpec s;
    s.trials = 0;
    CHECK_THROWS(s.validate());
    s = SimSpec{};
    s.window_radius = 2.0;
    CHECK_THROWS(s.validate());
    s = SimSpec{};
    s.x_b = Point(std::nan(""), 0.0);
    CHECK_THROWS(s.validate());
    s = small(10);
    s.level = SimLevel::femto;
    s.x_b = Point(5000.0, 0.0);
    CHECK_THROWS_AS(sample_trials(cfg, s), DomainError);
    CHECK_THROWS_AS(estimate_laplace_direct(cfg, -1.0, small(10)), DomainError);
  }
}
