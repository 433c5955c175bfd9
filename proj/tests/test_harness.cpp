#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "otb/constants.hpp"
#include "otb/errors.hpp"
#include "otb/harness.hpp"
#include "otb/rng.hpp"
#include "oracles.hpp"

using namespace otb;

namespace {

DiscreteMeasure two_atoms(double x0, double x1) { return DiscreteMeasure(1, {x0, x1}, {0.5, 0.5}); }

DistributionSpec grid(int d, int k, Norm norm = Norm::Max) {
  DistributionSpec g;
  g.kind = DistributionKind::GridUniform;
  g.dim = d;
  g.points_per_axis = k;
  g.norm = norm;
  return g;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("exact moments") {
    CHECK(exact_moment(two_atoms(-0.5, 0.5), 2, Norm::Max) == doctest::Approx(0.25).epsilon(1e-15));
    for (int d : {1, 2, 3})
      for (Norm norm : {Norm::Max, Norm::Euclidean}) {
        DistributionSpec g = grid(d, 6, norm);
        for (int q = 1; q <= 50; ++q) CHECK(exact_moment(g, q, norm) <= std::exp2(-q));
      }
    DiscreteMeasure four(1, {-0.5, -0.25, 0.25, 0.5}, {0.25, 0.25, 0.25, 0.25});
    for (double q : {1.0, 2.0, 5.0}) {
      MomentResult m = translation_optimized_moment(four, q, Norm::Max);
      CHECK(m.optimized <= m.plain * (1 + 1e-12));
      double grid_best = 1e300;
      for (int i = -1000; i <= 1000; ++i) {
        double x0 = i * 1e-3, s = 0;
        for (double x : {-0.5, -0.25, 0.25, 0.5}) s += 0.25 * std::pow(std::abs(x - x0), q);
        grid_best = std::min(grid_best, s);
      }
      CHECK(m.optimized <= grid_best * (1 + 1e-9));
    }
    DiscreteMeasure shifted(1, {0.1, 0.3}, {0.5, 0.5});
    MomentResult ms = translation_optimized_moment(shifted, 2, Norm::Max);
    CHECK(ms.optimized == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(ms.center[0] == doctest::Approx(0.2).epsilon(1e-4));
  }

  TEST_CASE("materialized distributions") {
    DiscreteMeasure g = materialize(grid(2, 4));
    CHECK(g.size() == 16);
    DiscreteMeasure e = materialize(grid(2, 8, Norm::Euclidean));
    CHECK(e.size() < 64);
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(norm_of(e.point(i), 2, Norm::Euclidean) <= 0.5);
    DistributionSpec par;
    par.kind = DistributionKind::ScaledPareto;
    par.dim = 3;
    DiscreteMeasure pm = materialize(par);
    double w = 0;
    for (double x : pm.weights()) w += x;
    CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::isfinite(exact_moment(par, 3.0, Norm::Max)));
  }

  TEST_CASE("rng and alias table") {
    CounterRng a(5, 7), b(5, 7), c(5, 8);
    for (int i = 0; i < 100; ++i) {
      std::uint64_t x = a.next();
      CHECK(x == b.next());
      CHECK(x != c.next());
    }
    CounterRng u(1, 0);
    for (int i = 0; i < 1000; ++i) {
      double v = u.uniform();
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
    AliasTable t({0.1, 0.0, 0.6, 0.3});
    std::vector<int> cnt(4, 0);
    CounterRng r(3, 0);
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) ++cnt[t.sample(r)];
    CHECK(cnt[1] == 0);
    CHECK(std::abs(cnt[0] / double(draws) - 0.1) < 0.005);
    CHECK(std::abs(cnt[2] / double(draws) - 0.6) < 0.005);
  }

  TEST_CASE("sample_empirical") {
    DiscreteMeasure one = DiscreteMeasure::dirac({0.2, 0.1});
    DiscreteMeasure s = sample_empirical(one, 50, 1, 0);
    CHECK(s.size() == 1);
    CHECK(s.weight(0) == 1.0);
    DiscreteMeasure g = materialize(grid(2, 5));
    DiscreteMeasure n1 = sample_empirical(g, 1, 9, 3);
    CHECK(n1.size() == 1);
    CHECK(n1.weight(0) == 1.0);
    DiscreteMeasure x = sample_empirical(g, 300, 4, 2), y = sample_empirical(g, 300, 4, 2);
    CHECK(x.coords() == y.coords());
    CHECK(x.weights() == y.weights());
    for (double w : x.weights()) CHECK(std::abs(w * 300 - std::round(w * 300)) < 1e-9);
    DiscreteMeasure z = sample_empirical(g, 300, 4, 3);
    CHECK(z.weights() != x.weights());
  }

  TEST_CASE("estimates with known values") {
    CostEstimate single = estimate_expected_cost(DiscreteMeasure::dirac({0.3}), 10, 1, Norm::Max, 30, 1);
    CHECK(single.mean == 0.0);
    CHECK(single.stderr_ == 0.0);
    CostEstimate two = estimate_expected_cost(two_atoms(0, 1), 2, 1, Norm::Max, 400, 1);
    CHECK(std::abs(two.mean - 0.25) <= 3 * two.stderr_);
    for (int n : {2, 8, 32, 77}) {
      CostEstimate e = estimate_expected_cost(two_atoms(0, 1), n, 1, Norm::Max, 400, 2);
      CHECK(std::abs(e.mean - oracles::binomial_abs_deviation(n)) <= 3 * e.stderr_);
    }
  }

  TEST_CASE("thread count does not change results") {
    DiscreteMeasure g = materialize(grid(2, 6));
    CostEstimate a = estimate_expected_cost(g, 100, 1, Norm::Max, 32, 17, 1);
    CostEstimate b = estimate_expected_cost(g, 100, 1, Norm::Max, 32, 17, 4);
    CHECK(a.values == b.values);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_ == b.stderr_);

    VerifyConfig cfg;
    cfg.name = "det";
    cfg.distribution = grid(1, 16);
    cfg.p = 1;
    cfg.q = 8;
    cfg.n_values = {10, 40};
    cfg.replicas = 30;
    CHECK(report_json(run_verification(cfg, 1)) == report_json(run_verification(cfg, 3)));
  }

  TEST_CASE("lower-bound sanity") {
    for (auto [d, k] : {std::pair{3, 10}, std::pair{5, 4}}) {
      CostEstimate e = estimate_expected_cost(grid(d, k), 100, 1, Norm::Max, 30, 5);
      CHECK(e.mean * std::pow(100.0, 1.0 / d) > 0.8 * gamma_lower_bound(d, 1));
    }
  }

  TEST_CASE("slope fit and pairwise sum") {
    std::vector<double> x = {1, 2, 4, 8, 16}, y;
    for (double v : x) y.push_back(3 * std::pow(v, -0.5));
    SlopeFit f = fit_log_slope(x, y);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f.stderr_ < 1e-10);
    std::vector<double> v(1001);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = double(i);
    CHECK(pairwise_sum(v.data(), v.size()) == 500500.0);
  }

  TEST_CASE("verification report") {
    VerifyConfig cfg;
    cfg.name = "small";
    cfg.distribution = grid(1, 32);
    cfg.p = 1;
    cfg.q = 10;
    cfg.n_values = {20, 80, 320};
    cfg.replicas = 40;
    VerifyReport r = run_verification(cfg);
    CHECK(r.regime == Regime::Supercritical);
    CHECK(r.expected_slope == -0.5);
    CHECK(r.discretized_target);
    REQUIRE(r.rows.size() == 3);
    for (const auto& row : r.rows) {
      CHECK(row.margin == doctest::Approx(row.bound - (row.mean + 3 * row.stderr_)));
      CHECK(row.pass == (row.margin >= 0));
    }
    CHECK(r.all_pass());
    CHECK(report_text(r).find("discretized target") != std::string::npos);
    CHECK(report_csv(r).find("n,") == 0);
    cfg.q = 2;
    CHECK_THROWS_AS(run_verification(cfg), NoBoundError);
  }

  TEST_CASE("config parsing") {
    VerifyConfig c = config_from_json(R"({"name":"x","distribution":{"kind":"grid_uniform","dim":2,"points_per_axis":4},
      "p":1,"q":3,"norm":"max","n_values":[10,20],"replicas":30,"seed":7})");
    CHECK(c.name == "x");
    CHECK(c.distribution.dim == 2);
    CHECK(c.distribution.points_per_axis == 4);
    CHECK(c.n_values == std::vector<long long>{10, 20});
    CHECK(c.seed == 7);
    CHECK(c.confidence_sigmas == 3.0);
    VerifyConfig f = config_from_json(R"({"distribution":{"kind":"finite_support","measure":
      {"dim":1,"points":[[0],[0.25]],"weights":[0.5,0.5]}},"p":1,"q":5,"n_values":[4],"replicas":30})");
    CHECK(f.distribution.kind == DistributionKind::FiniteSupport);
    CHECK(f.distribution.support.size() == 2);
    CHECK_THROWS_AS(config_from_json(R"({"distribution":{"kind":"nope"},"p":1,"q":5,"n_values":[4]})"), InputError);
    CHECK_THROWS_AS(config_from_json("not json"), InputError);
    for (const char* name : {"grid_d1_p1", "grid_d1_p2", "grid_d2_p1_critical", "grid_d3_p1", "grid_d3_p2",
                             "pareto_d3_p2_low_moment"}) {
      VerifyConfig s = load_config(std::string(OTB_CONFIG_DIR) + "/" + name + ".json");
      CHECK(s.replicas >= 200);
      CHECK_FALSE(s.n_values.empty());
    }
  }
}
