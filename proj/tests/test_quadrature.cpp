#include <doctest.h>

#include <cmath>
#include <numbers>

#include "femto/quadrature.hpp"

using namespace femto;

TEST_SUITE("quadrature") {
  TEST_CASE("smooth integrals") {
    const QuadResult q = integrate([](double x) { return std::exp(x); }, 0.0, 1.0);
    CHECK(q.converged);
    CHECK(q.value == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    CHECK(q.error < 1e-10);
    const QuadResult s = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-13));
  }

  TEST_CASE("endpoint singularity and breakpoints") {
    const QuadResult q = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, Tolerance{1e-12, 1e-10, 400});
    CHECK(q.value == doctest::Approx(2.0).epsilon(1e-8));
    const double bp[3] = {-1.0, 0.3, 2.0};
    const QuadResult k = integrate([](double x) { return x < 0.3 ? 1.0 : 3.0; }, std::span<const double>(bp, 3));
    CHECK(k.value == doctest::Approx(1.3 + 3.0 * 1.7).epsilon(1e-14));
  }

  TEST_CASE("interval budget is reported") {
    const QuadResult q =
        integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, Tolerance{1e-15, 1e-15, 5});
    CHECK_FALSE(q.converged);
  }

  TEST_CASE("Gauss-Legendre rules") {
    for (int n : {2, 5, 12, 24}) {
      const GaussRule& g = gauss_legendre(n);
      double w = 0.0, m = 0.0;
      for (int i = 0; i < n; ++i) {
        w += g.weights[i];
        m += g.weights[i] * std::pow(g.nodes[i], 2 * n - 2);
      }
      CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
      CHECK(m == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-12));
    }
    CHECK(composite_gauss([](double x) { return x * x; }, 0.0, 3.0, 4, 3) == doctest::Approx(9.0).epsilon(1e-14));
  }

  TEST_CASE("Kronrod nodes integrate with both weight sets") {
    const double bp[3] = {0.0, 1.0, 4.0};
    const KronrodNodes k = kronrod_nodes(std::span<const double>(bp, 3));
    double sk = 0.0, sg = 0.0;
    for (std::size_t i = 0; i < k.x.size(); ++i) {
      sk += k.wk[i] * std::cos(k.x[i]);
      sg += k.wg[i] * std::cos(k.x[i]);
    }
    CHECK(sk == doctest::Approx(std::sin(4.0)).epsilon(1e-13));
    CHECK(sg == doctest::Approx(std::sin(4.0)).epsilon(1e-6));
  }
}
