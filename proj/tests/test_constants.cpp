#include <cmath>
#include <vector>

#include "doctest.h"
#include "otb/constants.hpp"
#include "otb/errors.hpp"

using namespace otb;

namespace {

// Plain-formula evaluation of the Euclidean subcritical constant at fixed r.
double kappa_euc_plain(int d, double p, double r) {
  double K = kd_upper(d);
  return std::pow(K / 4.0, p / d) * std::pow(r, 2 * p) * std::pow(1 - std::pow(r, -d / 2.0), 1 - 2 * p / d) /
         (std::pow(r - 2, p) * (1 - std::pow(r, p - d / 2.0)));
}

}  // namespace

TEST_SUITE("constants") {
  TEST_CASE("eps_p") {
    CHECK(eps_p(1) == 0.5);
    CHECK(eps_p(2) == 0.5);
    CHECK(eps_p(0.5) == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
    CHECK_THROWS_AS(eps_p(0), DomainError);
    CHECK_THROWS_AS(eps_p(-1), DomainError);
  }

  TEST_CASE("h_factor") {
    CHECK(h_factor(0, 2, 4) == doctest::Approx(4.0).epsilon(1e-14));
    double h = h_factor(1, 2, 1000);
    CHECK(h > 1.0);
    CHECK(h < 1.05);
    CHECK(h_factor(0.5 / 2.4142135623730951, 2, 40.4) <= 1.25);
    CHECK_THROWS_AS(h_factor(1, 2, 2), DomainError);
    CHECK_THROWS_AS(h_factor(1, 2, 1.5), DomainError);
    // Direct formula away from overflow.
    double x = 0.3, s = 1.5, q = 7.0;
    double direct = std::pow(x * (q - s) / s + (1 + x) * std::pow(q / s, q / (q - s)), s / q) * q / (q - s);
    CHECK(h_factor(x, s, q) == doctest::Approx(direct).epsilon(1e-13));
  }

  TEST_CASE("kd_upper") {
    KdComponents k = kd_components(8);
    CHECK(k.k1 == doctest::Approx(64 * (std::log(8.0) + std::log(std::log(8.0)) + 5)).epsilon(1e-14));
    CHECK(k.k1 == doctest::Approx(499.94).epsilon(1e-5));
    CHECK(kd_upper(8) == std::max(k.k1, std::max(k.k2, k.k3)));
    double k100 = kd_upper(100);
    CHECK(std::isfinite(k100));
    CHECK(std::pow(k100, 1.0 / 100) < 1.2);
    CHECK(std::pow(kd_upper(100000), 1.0 / 100000) < 1.001);
    CHECK_THROWS_AS(kd_upper(7), UnsupportedDimensionError);
  }

  TEST_CASE("kappa_max_norm examples") {
    CHECK(kappa_max_norm(1, 1).value == doctest::Approx(1 + std::sqrt(2.0)).epsilon(1e-13));
    CHECK(kappa_max_norm(1, 1).value == doctest::Approx(2.41421).epsilon(1e-5));
    // d = 3 evaluates to 3.71945 (rounds up to 3.72).
    double k3 = kappa_max_norm(3, 1).value;
    double direct = std::pow(2.0, 1 - 2.0 / 3) * std::pow(1 - std::pow(2.0, -1.5), 1.0 / 3) / (1 - std::pow(2.0, -0.5));
    CHECK(k3 == doctest::Approx(direct).epsilon(1e-13));
    CHECK(std::ceil(k3 * 100) / 100 == doctest::Approx(3.72));
    for (long long N : {4LL, 10LL, 1000LL, 1000000LL}) {
      ConstantDetail c = kappa_max_norm(2, 1, N);
      CHECK(c.n_dependent);
      CHECK(c.value == doctest::Approx(std::log(double(N)) / (2 * std::log(2.0)) + 1.0).epsilon(1e-12));
    }
    CHECK(kappa_max_norm(5, 2).value == doctest::Approx(7.5447).epsilon(1e-4));
    CHECK(std::sqrt(kappa_max_norm(5, 2).value) == doctest::Approx(2.7468).epsilon(1e-4));
    CHECK_THROWS_AS(kappa_max_norm(2, 1), ArgumentError);
    CHECK_THROWS_AS(kappa_max_norm(4, 2), ArgumentError);
    CHECK_FALSE(kappa_max_norm(3, 1).chosen_r.has_value());
  }

  TEST_CASE("critical log-affine coefficients") {
    CriticalAffine a1 = critical_affine_max_norm(1);
    CHECK(a1.a == doctest::Approx(0.72135).epsilon(1e-5));
    CHECK(a1.b == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a1.n_floor == 4);
    CriticalAffine a2 = critical_affine_max_norm(2);
    CHECK(a2.n_floor == 8);
    for (long long N : {8LL, 100LL, 12345LL})
      CHECK(kappa_max_norm(4, 2, N).value == doctest::Approx(a2.a * std::log(double(N)) + a2.b).epsilon(1e-12));
    // Below the floor log_+ clips to zero.
    CHECK(kappa_max_norm(2, 1, 3).value == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("kappa_euclidean examples") {
    ConstantDetail k8 = kappa_euclidean(8, 1);
    CHECK(k8.value == doctest::Approx(23.44).epsilon(0.01 / 23.44));
    REQUIRE(k8.chosen_r.has_value());
    CHECK(*k8.chosen_r > 2.0);
    CHECK(kappa_euclidean(100, 1).value == doctest::Approx(8.93).epsilon(0.01 / 8.93));
    ConstantDetail big = kappa_euclidean(100000, 1);
    CHECK(std::abs(big.value - 8.0) < 0.08);
    CHECK(std::abs(*big.chosen_r - 4.0) < 0.2);
    CHECK_THROWS_AS(kappa_euclidean(7, 1), UnsupportedDimensionError);
    CHECK_THROWS_AS(kappa_euclidean(8, 4), ArgumentError);
  }

  TEST_CASE("kappa_euclidean matches a dense r grid") {
    for (int d : {8, 20, 75}) {
      double best = 1e300;
      for (int i = 0; i <= 200000; ++i) {
        double r = std::exp(std::log(2.001) + i * (std::log(1000.0) - std::log(2.001)) / 200000);
        best = std::min(best, kappa_euc_plain(d, 1, r));
      }
      double v = kappa_euclidean(d, 1).value;
      CHECK(v <= best * (1 + 1e-12));
      CHECK(v == doctest::Approx(best).epsilon(1e-6));
      CHECK(kappa_euclidean_r(d, 1, 4.0) == doctest::Approx(kappa_euc_plain(d, 1, 4.0)).epsilon(1e-12));
    }
  }

  TEST_CASE("theta_factor examples") {
    ConstantDetail k = kappa_max_norm(3, 1);
    CHECK(theta_factor(3, 1, 7.3, k) <= 2.0);
    CHECK(theta_factor(3, 1, 7.2, k) > 2.0);
    ConstantDetail ke = kappa_euclidean(8, 2);
    CHECK(std::sqrt(theta_factor(8, 2, 20.5, ke)) <= 1.25);
    CHECK(theta_factor(3, 1, 1e6, k) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_THROWS_AS(theta_factor(3, 1, 1.5, k), DomainError);
    CHECK_THROWS_AS(theta_factor(1, 1, 2.0, kappa_max_norm(1, 1)), DomainError);
  }

  TEST_CASE("zeta_low_moment") {
    ConstantDetail z = zeta_low_moment(3, 2, 3);
    CHECK(std::isfinite(z.value));
    CHECK(z.value > 0);
    REQUIRE(z.chosen_a.has_value());
    CHECK(*z.chosen_a > 1.0);
    double grid = 1e300;
    for (int i = 1; i <= 100000; ++i) {
      double a = 1.0 + i * 1e-4 * 10;  // (1, 1001]
      double f = std::pow(a, 2) / (std::pow(a, 2 - 1.5) - 1) + std::pow(a, 2) / (1 - std::pow(a, -1.0));
      grid = std::min(grid, f);
    }
    double bracket = zeta_bracket(3, 2, 3);
    double bracket_direct = 0.5 * std::pow(2.0, 4.0 / 3 - 1) +
                            std::pow(4.0 / (std::pow(2.0, 1.5) - 1), 2.0 / 3) * (1 - 0.25) / (1 - std::pow(2.0, 3 - 2 - 2.0));
    CHECK(bracket == doctest::Approx(bracket_direct).epsilon(1e-13));
    CHECK(z.value <= bracket * grid * (1 + 1e-12));
    CHECK(z.value == doctest::Approx(bracket * grid).epsilon(1e-6));
    CHECK_THROWS_AS(zeta_low_moment(3, 2, 4), DomainError);
    CHECK_THROWS_AS(zeta_low_moment(3, 2, 2), DomainError);
    ConstantDetail z2 = zeta_low_moment(2, 1, 1.5);
    CHECK(std::isfinite(z2.value));
    CHECK(z2.value > 0);
  }

  TEST_CASE("gamma_lower_bound") {
    CHECK(gamma_lower_bound(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gamma_lower_bound(3, 1) == doctest::Approx(0.44649).epsilon(1e-5));
    double g = std::sqrt(gamma_lower_bound(5, 2));
    CHECK(g > 0.47);
    CHECK(g < 0.5);
    // Gamma(1 + 1/2) = sqrt(pi)/2.
    CHECK(gamma_lower_bound(2, 1) == doctest::Approx(std::sqrt(std::acos(-1.0)) / 4).epsilon(1e-14));
  }

  TEST_CASE("kappa^(1/p) increases with p") {
    for (int d : {1, 3, 5, 10, 100}) {
      double prev = 0;
      for (int i = 1; i < 50; ++i) {
        double p = i * (d / 2.0) / 50;
        double v = std::pow(kappa_max_norm(d, p).value, 1.0 / p);
        CHECK(v > prev);
        prev = v;
      }
    }
    for (int d : {8, 30}) {
      for (double r : {2.5, 4.0, 10.0}) {
        double prev = 0;
        for (int i = 1; i < 40; ++i) {
          double p = i * (d / 2.0) / 40;
          double v = std::pow(kappa_euclidean_r(d, p, r), 1.0 / p);
          CHECK(v > prev);
          prev = v;
        }
      }
    }
  }

  TEST_CASE("large-d limit of the max-norm constant") {
    for (double p : {1.0, 2.0}) CHECK(std::abs(kappa_max_norm(1000000, p).value - std::pow(2.0, p)) < 1e-3);
  }

  TEST_CASE("theta decreases in q towards 1") {
    ConstantDetail k = kappa_max_norm(3, 1);
    double prev = 1e300;
    for (double q = 1.6; q < 200; q += 0.7) {
      double t = theta_factor(3, 1, q, k);
      CHECK(t < prev);
      CHECK(t > 1.0);
      prev = t;
    }
  }

  TEST_CASE("critical theta is nonincreasing in N") {
    for (int d : {2, 4}) {
      double p = d / 2.0;
      double prev = 1e300;
      for (long long N = 1; N <= 1000000; N = N < 1000 ? N + 1 : N + 997) {
        double t = theta_factor(d, p, 3 * p, kappa_max_norm(d, p, N));
        CHECK(t <= prev);
        prev = t;
      }
    }
  }

  TEST_CASE("lower constant below upper constant") {
    for (int d : {3, 4, 5, 8, 20, 100})
      for (double p : {0.25, 0.5, 1.0, 1.4})
        if (p < d / 2.0) CHECK(gamma_lower_bound(d, p) < kappa_max_norm(d, p).value);
  }
}
