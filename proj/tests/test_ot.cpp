#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "otb/errors.hpp"
#include "otb/ot.hpp"
#include "oracles.hpp"

using namespace otb;

namespace {

std::vector<double> random_simplex(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double s = 0;
  for (auto& x : w) s += (x = u(gen));
  for (auto& x : w) x /= s;
  return w;
}

DiscreteMeasure random_measure(std::mt19937_64& gen, int dim, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> c(n * dim);
  for (auto& x : c) x = u(gen);
  return DiscreteMeasure(dim, c, random_simplex(gen, n));
}

DiscreteMeasure line(std::vector<double> x, std::vector<double> w) { return DiscreteMeasure(1, x, w); }

}  // namespace

TEST_SUITE("ot") {
  TEST_CASE("examples") {
    std::mt19937_64 gen(1);
    DiscreteMeasure mu = random_measure(gen, 3, 12);
    OtResult same = exact_transport_cost(mu, mu, 2, Norm::Max);
    CHECK(same.cost == 0.0);
    CHECK(same.certified);
    for (const auto& t : same.plan.triples) CHECK(t.i == t.j);

    DiscreteMeasure d0 = DiscreteMeasure::dirac({0, 0});
    DiscreteMeasure dx = DiscreteMeasure::dirac({0.3, -0.4});
    CHECK(exact_transport_cost(d0, dx, 1, Norm::Euclidean).cost == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(exact_transport_cost(d0, dx, 2, Norm::Max).cost == doctest::Approx(0.16).epsilon(1e-14));

    DiscreteMeasure a = line({0, 1}, {0.5, 0.5}), b = line({0, 2}, {0.5, 0.5});
    CHECK(exact_transport_cost(a, b, 1, Norm::Max).cost == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(exact_transport_cost_1d(a, b, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(exact_transport_cost_1d(a, a, 1) == 0.0);
    DiscreteMeasure c = line({0.5, 1.5}, {0.5, 0.5});
    CHECK(exact_transport_cost_1d(a, c, 2) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(exact_transport_cost(a, c, 2, Norm::Max).cost == doctest::Approx(0.25).epsilon(1e-14));
  }

  TEST_CASE("plan is feasible and consistent") {
    std::mt19937_64 gen(5);
    for (int it = 0; it < 30; ++it) {
      DiscreteMeasure mu = random_measure(gen, 2, 5 + it), nu = random_measure(gen, 2, 40 - it);
      OtResult r = exact_transport_cost(mu, nu, 1.5, Norm::Euclidean);
      CHECK(r.certified);
      CHECK(marginal_error(r.plan, mu, nu) <= 1e-12);
      CHECK(plan_cost(r.plan, mu, nu, 1.5, Norm::Euclidean) == doctest::Approx(r.cost).epsilon(1e-12));
      for (const auto& t : r.plan.triples) CHECK(t.mass >= 0);
      CHECK(r.plan.triples.size() <= mu.size() + nu.size() - 1);
    }
  }

  TEST_CASE("agrees with vertex enumeration") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> sz(1, 4);
    std::uniform_real_distribution<double> uc(0, 3);
    int mismatches = 0;
    for (int it = 0; it < 500; ++it) {
      std::size_t m = sz(gen), n = sz(gen);
      std::vector<double> cost(m * n);
      for (auto& x : cost) x = uc(gen);
      if (it % 5 == 0)
        for (auto& x : cost) x = std::floor(x);  // degenerate ties
      std::vector<double> a = random_simplex(gen, m), b = random_simplex(gen, n);
      if (it % 7 == 0 && m == n) b = a;  // degenerate supplies
      double oracle = oracles::vertex_enumeration(cost, m, n, a, b);
      OtResult r = solve_transport(cost, m, n, a, b);
      if (!r.certified || std::abs(r.cost - oracle) > 1e-10 * std::max(1.0, oracle)) ++mismatches;
    }
    CHECK(mismatches == 0);
  }

  TEST_CASE("one-dimensional fast path matches the flow solver") {
    std::mt19937_64 gen(3);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      for (int it = 0; it < 20; ++it) {
        DiscreteMeasure mu = random_measure(gen, 1, 3 + it), nu = random_measure(gen, 1, 30 - it, 2.0);
        double flow = exact_transport_cost(mu, nu, p, Norm::Max).cost;
        CHECK(exact_transport_cost_1d(mu, nu, p) == doctest::Approx(flow).epsilon(1e-10));
      }
    }
    DiscreteMeasure mu = random_measure(gen, 1, 9), nu = random_measure(gen, 1, 11);
    CHECK(exact_transport_cost_1d(mu, nu, 0.5) ==
          doctest::Approx(exact_transport_cost(mu, nu, 0.5, Norm::Max).cost).epsilon(1e-12));
    CHECK_THROWS_AS(exact_transport_cost_1d(random_measure(gen, 2, 3), random_measure(gen, 2, 3), 1), ArgumentError);
  }

  TEST_CASE("norm sandwich") {
    std::mt19937_64 gen(11);
    for (int d : {2, 3, 5})
      for (double p : {0.5, 1.0, 2.0})
        for (int it = 0; it < 10; ++it) {
          DiscreteMeasure mu = random_measure(gen, d, 15), nu = random_measure(gen, d, 12);
          double tm = exact_transport_cost(mu, nu, p, Norm::Max).cost;
          double te = exact_transport_cost(mu, nu, p, Norm::Euclidean).cost;
          CHECK(tm <= te * (1 + 1e-12));
          CHECK(te <= std::pow(d, p / 2) * tm * (1 + 1e-12));
        }
  }

  TEST_CASE("scaling") {
    std::mt19937_64 gen(12);
    for (double p : {0.5, 1.0, 2.0})
      for (double alpha : {0.1, 3.0}) {
        DiscreteMeasure mu = random_measure(gen, 2, 20), nu = random_measure(gen, 2, 25);
        double base = exact_transport_cost(mu, nu, p, Norm::Euclidean).cost;
        double sc = exact_transport_cost(mu.scaled(alpha), nu.scaled(alpha), p, Norm::Euclidean).cost;
        CHECK(sc == doctest::Approx(std::pow(alpha, p) * base).epsilon(1e-10));
      }
  }

  TEST_CASE("triangle inequality") {
    std::mt19937_64 gen(13);
    for (double p : {1.0, 2.0, 3.0})
      for (int it = 0; it < 15; ++it) {
        DiscreteMeasure x = random_measure(gen, 2, 10), y = random_measure(gen, 2, 14), z = random_measure(gen, 2, 8);
        auto w = [&](const DiscreteMeasure& a, const DiscreteMeasure& b) {
          return std::pow(exact_transport_cost(a, b, p, Norm::Max).cost, 1 / p);
        };
        CHECK(w(x, z) <= (w(x, y) + w(y, z)) * (1 + 1e-12));
      }
  }

  TEST_CASE("integer weights") {
    IntegerWeights w = integer_weights({0.25, 0.75}, {0.5, 0.125, 0.375});
    CHECK(w.exact);
    CHECK(w.total == 8);
    CHECK(w.a == std::vector<std::int64_t>{2, 6});
    IntegerWeights t = integer_weights({1.0 / 3, 2.0 / 3}, {1.0});
    CHECK(t.exact);
    CHECK(t.total == 3);
    IntegerWeights r = integer_weights({0.1234567891234, 1 - 0.1234567891234}, {1.0});
    std::int64_t sa = 0;
    for (auto v : r.a) sa += v;
    CHECK(sa == r.total);
    CHECK(r.b[0] == r.total);
  }

  TEST_CASE("errors") {
    std::vector<double> c(3200);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = double(i) / 3200;
    DiscreteMeasure big(1, c, std::vector<double>(3200, 1.0 / 3200));
    CHECK_THROWS_AS(exact_transport_cost(big, big, 1, Norm::Max), CapacityError);
    CHECK_THROWS_AS(DiscreteMeasure(1, {0, 1}, {0.5, 0.6}), NormalizationError);
    CHECK_THROWS_AS(DiscreteMeasure(1, {0, 1}, {1.5, -0.5}), NormalizationError);
  }
}
