#pragma once

#include <cstdint>
#include <vector>

#include "otb/measure.hpp"

namespace otb {

constexpr std::size_t kMaxTransportArcs = 10'000'000;

// Row-major m x n matrix of |x_i - y_j|^p.
std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, Norm norm);

// Integer supplies over a common total. Weights that are all rationals with
// denominators up to 2^20 are scaled exactly by the lcm; otherwise the total
// is 2^42 and rounding uses largest remainders.
struct IntegerWeights {
  std::vector<std::int64_t> a;
  std::vector<std::int64_t> b;
  std::int64_t total = 0;
  bool exact = false;
};
IntegerWeights integer_weights(const std::vector<double>& a, const std::vector<double>& b);

struct OtResult {
  double cost = 0.0;
  TransportPlan plan;
  bool certified = false;  // complementary slackness verified
  std::size_t pivots = 0;
};

// Balanced transportation problem on a dense cost matrix (network simplex).
OtResult solve_transport(const std::vector<double>& cost, std::size_t m, std::size_t n,
                         const std::vector<double>& a, const std::vector<double>& b);

OtResult exact_transport_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, Norm norm);

// Monotone rearrangement for d = 1 and p >= 1; falls back to the flow solver for p < 1.
double exact_transport_cost_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

}  // namespace otb
