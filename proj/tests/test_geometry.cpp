#include <doctest.h>

#include <cmath>
#include <random>

#include "femto/geometry.hpp"
#include "femto/oracles.hpp"
#include "femto/rng.hpp"

using namespace femto;

namespace {
const double kS3 = std::sqrt(3.0);
}

TEST_SUITE("geometry") {
  TEST_CASE("nearest_bs on the unit lattice") {
    const HexGrid<double> g(1.0);
    CHECK(nearest_bs(Point(0.0, 0.0), g) == Point(0.0, 0.0));
    const Point p = nearest_bs(Point(1.4, 0.1), g);
    CHECK(p.x() == doctest::Approx(1.5));
    CHECK(p.y() == doctest::Approx(kS3 / 2.0));
    CHECK(p == oracle::nearest_bs_exhaustive(Point(1.4, 0.1), 1.0));
  }

  TEST_CASE("lattice points map to themselves") {
    const HexGrid<double> g(500.0);
    const Point c(1.5 * 500.0, kS3 / 2.0 * 500.0);
    CHECK(nearest_bs(c, g) == g.lattice_point({1, 0}));
    CHECK((nearest_bs(c, g) - c).norm() < 1e-9);
    for (long a = -4; a <= 4; ++a)
      for (long b = -4; b <= 4; ++b) CHECK(g.nearest_index(g.lattice_point({a, b})) == LatticeIndex{a, b});
  }

  TEST_CASE("nearest_bs agrees with exhaustive search") {
    CounterRng rng(11, 0);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    for (double rc : {1.0, 500.0}) {
      const HexGrid<double> g(rc);
      for (int i = 0; i < 4000; ++i) {
        const Point p(u(rng) * rc, u(rng) * rc);
        const Point a = nearest_bs(p, g);
        const Point b = oracle::nearest_bs_exhaustive(p, rc);
        CHECK((a - p).norm() == doctest::Approx((b - p).norm()).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("ties go to the lexicographically smallest index") {
    const HexGrid<double> g(1.0);
    // Midpoint of (0,0) and (1.5, sqrt3/2): equidistant from both.
    const Point mid(0.75, kS3 / 4.0);
    CHECK(g.nearest_index(mid) == LatticeIndex{0, 0});
    // At a vertex the three distances agree only up to rounding, so any of
    // the three cells sharing it is acceptable.
    const LatticeIndex v = g.nearest_index(Point(1.0, 0.0));
    CHECK((v == LatticeIndex{0, 0} || v == LatticeIndex{1, 0} || v == LatticeIndex{1, -1}));
  }

  TEST_CASE("nearest_bs is covariant under lattice translations") {
    const HexGrid<double> g(2.0);
    CounterRng rng(3, 0);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
      const Point p(u(rng), u(rng));
      const Point v = g.lattice_point({2, -3});
      CHECK((nearest_bs(Point(p + v), g) - (nearest_bs(p, g) + v)).norm() < 1e-9);
    }
  }

  TEST_CASE("in_hexagon") {
    const HexGrid<double> g(500.0);
    const Point c = g.lattice_point({0, 0});
    CHECK(in_hexagon(c, c, g));
    CHECK_FALSE(in_hexagon(Point(1000.0, 0.0), c, g));
    // (0.9 R_c, 0) is inside the flat-sided hexagon with vertices at (+-R_c, 0).
    const Point p(450.0, 0.0);
    CHECK(in_hexagon(p, c, g) == (oracle::nearest_bs_exhaustive(p, 500.0) == c));
    CHECK(in_hexagon(p, c, g));
  }

  TEST_CASE("in_hexagon partitions the plane") {
    const HexGrid<double> g(1.0);
    CounterRng rng(5, 0);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int i = 0; i < 2000; ++i) {
      const Point p(u(rng), u(rng));
      int hits = 0;
      for (long a = -5; a <= 5; ++a)
        for (long b = -5; b <= 5; ++b) hits += in_hexagon(p, g.lattice_point({a, b}), g);
      CHECK(hits == 1);
    }
  }

  TEST_CASE("hex_area") {
    CHECK(hex_area(HexGrid<double>(1.0)) == doctest::Approx(2.598076).epsilon(1e-6));
    CHECK(hex_area(HexGrid<double>(2.0)) == doctest::Approx(4.0 * hex_area(HexGrid<double>(1.0))));
    CHECK(std::abs(hex_area(HexGrid<double>(500.0)) - 649519.0) < 1.0);

    // Rejection inside the circumscribed disk.
    const HexGrid<double> g(500.0);
    CounterRng rng(17, 0);
    const int n = 200000;
    int in = 0;
    for (int i = 0; i < n; ++i) in += in_hexagon(detail::uniform_in_disk(rng, Point(0.0, 0.0), 500.0), Point(0, 0), g);
    const double p = double(in) / n, disk = std::numbers::pi * 500.0 * 500.0;
    const double se = std::sqrt(p * (1 - p) / n) * disk;
    CHECK(std::abs(p * disk - hex_area(g)) < 3.0 * se);
  }

  TEST_CASE("float instantiation") {
    const HexGrid<float> g(1.0f);
    const Point2<float> p = nearest_bs(Point2<float>(1.4f, 0.1f), g);
    CHECK(p.x() == doctest::Approx(1.5));
    CHECK(hex_area(g) == doctest::Approx(2.598076).epsilon(1e-5));
  }

  TEST_CASE("invalid geometry is rejected") {
    CHECK_THROWS_AS(HexGrid<double>(0.0), DomainError);
    CHECK_THROWS_AS(DiskRegion<double>(Point::Zero(), -1.0), DomainError);
    using Prof = IntensityProfile<double>;
    CHECK_THROWS_AS(Prof(std::vector<Prof::Step>{}), DomainError);
    CHECK_THROWS_AS(Prof({{2.0, 1.0}, {1.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(Prof({{1.0, -1.0}}), DomainError);
  }

  TEST_CASE("sample_uniform_hexagon") {
    const HexGrid<double> g(1.0);
    CounterRng rng(23, 0);
    const int n = 100000;
    Point mean = Point::Zero();
    Point sq = Point::Zero();
    int inside = 0, right = 0;
    for (int i = 0; i < n; ++i) {
      const Point p = sample_uniform_hexagon(rng, g);
      mean += p;
      sq += p.cwiseProduct(p);
      inside += in_hexagon(p, Point(0, 0), g);
      right += p.x() > 0.0;
    }
    mean /= n;
    const Point sd = (sq / n - mean.cwiseProduct(mean)).cwiseSqrt();
    CHECK(std::abs(mean.x()) < 3.0 * sd.x() / std::sqrt(n));
    CHECK(std::abs(mean.y()) < 3.0 * sd.y() / std::sqrt(n));
    CHECK(inside == n);
    // The halves x > 0 and x < 0 have equal area.
    CHECK(std::abs(double(right) / n - 0.5) < 3.0 * std::sqrt(0.25 / n));
  }

  TEST_CASE("sample_ppp_window counts are Poisson") {
    CounterRng rng(29, 0);
    CHECK(sample_ppp_window(rng, 0.0, DiskRegion<double>(Point::Zero(), 3.0)).empty());

    const DiskRegion<double> w(Point(1.0, -2.0), 2.0);
    const double density = 0.5, mean = density * w.area();
    const int n = 10000;
    std::vector<long> counts(n);
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto pts = sample_ppp_window(rng, density, w);
      for (const auto& p : pts) REQUIRE(w.contains(p));
      counts[i] = long(pts.size());
      s += double(counts[i]);
      s2 += double(counts[i]) * double(counts[i]);
    }
    const double m = s / n, var = s2 / n - m * m;
    CHECK(std::abs(m - mean) < 3.0 * std::sqrt(mean / n));
    CHECK(var == doctest::Approx(mean).epsilon(0.05));

    // Chi-square goodness of fit on bins 0..kmax-1 and a pooled tail.
    const int kmax = 15;
    std::vector<double> obs(kmax + 1, 0.0), expect(kmax + 1, 0.0);
    for (long c : counts) obs[std::min<long>(c, kmax)] += 1.0;
    double pk = std::exp(-mean), cdf = 0.0;
    for (int k = 0; k < kmax; ++k) {
      expect[k] = n * pk;
      cdf += pk;
      pk *= mean / (k + 1);
    }
    expect[kmax] = n * (1.0 - cdf);
    double chi2 = 0.0;
    for (int k = 0; k <= kmax; ++k) chi2 += (obs[k] - expect[k]) * (obs[k] - expect[k]) / expect[k];
    CHECK(chi2 < 30.58);  // 99th percentile of chi-square with 15 degrees of freedom
  }

  TEST_CASE("sample_ppp_profile") {
    CounterRng rng(31, 0);
    using Prof = IntensityProfile<double>;
    CHECK(sample_ppp_profile(rng, Prof::constant(0.0, 1.0), Point(0, 0)).empty());

    const int n = 20000;
    const Prof flat = Prof::constant(2.0, 1.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += double(sample_ppp_profile(rng, flat, Point(3, 4)).size());
    const double mean = 2.0 * std::numbers::pi;
    CHECK(std::abs(total / n - mean) < 3.0 * std::sqrt(mean / n));

    const Prof steps({{0.5, 4.0}, {1.0, 1.0}});
    const auto masses = steps.annulus_means();
    double inner = 0.0, outer = 0.0;
    for (int i = 0; i < n; ++i)
      for (const auto& p : sample_ppp_profile(rng, steps, Point(0, 0))) (p.norm() <= 0.5 ? inner : outer) += 1.0;
    CHECK(std::abs(inner / n - masses[0]) < 3.0 * std::sqrt(masses[0] / n));
    CHECK(std::abs(outer / n - masses[1]) < 3.0 * std::sqrt(masses[1] / n));
    CHECK(steps.mean_count() == doctest::Approx(masses[0] + masses[1]));
  }
}
