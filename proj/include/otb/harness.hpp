#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otb/constants.hpp"
#include "otb/measure.hpp"

namespace otb {

enum class DistributionKind { FiniteSupport, GridUniform, ScaledPareto };

struct DistributionSpec {
  DistributionKind kind = DistributionKind::GridUniform;
  int dim = 1;
  Norm norm = Norm::Max;  // ball used by GridUniform and the Pareto radius
  DiscreteMeasure support;   // FiniteSupport
  int points_per_axis = 8;   // GridUniform: cell centers of [-1/2, 1/2]^d, cut to the ball of radius 1/2
  double tail_index = 3.2;   // ScaledPareto: P(|X| > t) = (t / scale)^{-tail_index}, t >= scale
  double scale = 0.5;
  double shell_ratio = 1.4142135623730951;
  double truncation = 1e-6;  // shells stop once the remaining tail mass is below this
};

DiscreteMeasure materialize(const DistributionSpec& dist);

struct MomentResult {
  double plain = 0.0;
  double optimized = 0.0;  // inf over x0 of sum w |x - x0|^q (<= plain)
  std::vector<double> center;
};

double exact_moment(const DistributionSpec& dist, double q, Norm norm);
double exact_moment(const DiscreteMeasure& m, double q, Norm norm);
MomentResult translation_optimized_moment(const DiscreteMeasure& m, double q, Norm norm);

DiscreteMeasure sample_empirical(const DiscreteMeasure& dist, long long n, std::uint64_t seed,
                                 std::uint64_t replica_index);
DiscreteMeasure sample_empirical(const DistributionSpec& dist, long long n, std::uint64_t seed,
                                 std::uint64_t replica_index);

struct CostEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> values;  // per replica
};

CostEstimate estimate_expected_cost(const DiscreteMeasure& dist, long long n, double p, Norm norm, int replicas,
                                    std::uint64_t seed, unsigned threads = 0);
CostEstimate estimate_expected_cost(const DistributionSpec& dist, long long n, double p, Norm norm, int replicas,
                                    std::uint64_t seed, unsigned threads = 0);

struct VerifyConfig {
  std::string name;
  DistributionSpec distribution;
  double p = 1.0;
  double q = 2.0;
  Norm norm = Norm::Max;
  std::vector<long long> n_values;
  int replicas = 200;
  std::uint64_t seed = 1;
  double confidence_sigmas = 3.0;
  bool refine_p = false;
  bool optimize_moment = false;
};

struct VerifyRow {
  long long n = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct VerifyReport {
  std::string name;
  Regime regime = Regime::Subcritical;
  double moment = 0.0;
  double expected_slope = 0.0;
  double slope = 0.0;
  double slope_stderr = 0.0;
  bool discretized_target = false;
  std::vector<VerifyRow> rows;
  bool all_pass() const;
};

struct SlopeFit {
  double slope = 0.0;
  double stderr_ = 0.0;
};
// Least squares of ln y on ln x.
SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

double pairwise_sum(const double* v, std::size_t n);

VerifyConfig config_from_json(const std::string& text);
VerifyConfig load_config(const std::string& path);

VerifyReport run_verification(const VerifyConfig& config, unsigned threads = 0);

std::string report_text(const VerifyReport& r);
std::string report_csv(const VerifyReport& r);
std::string report_json(const VerifyReport& r);

}  // namespace otb
