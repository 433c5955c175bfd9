#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "otb/constants.hpp"

namespace otb {

// Finite measure on R^dim; coordinates stored row-major.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  // Merges duplicate points (weights summed, first occurrence kept) and
  // checks weights are nonnegative and sum to 1 within 1e-9.
  DiscreteMeasure(int dim, std::vector<double> coords, std::vector<double> weights);

  static DiscreteMeasure dirac(std::vector<double> point);

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  const double* point(std::size_t i) const { return coords_.data() + i * std::size_t(dim_); }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<double>& weights() const { return weights_; }

  DiscreteMeasure scaled(double alpha) const;

 private:
  int dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

double norm_of(const double* x, int dim, Norm norm);
double distance(const double* x, const double* y, int dim, Norm norm);

struct Triple {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::vector<Triple> triples;
  double cost = 0.0;
  double p = 1.0;
};

// Sum of mass * |x_i - y_j|^p.
double plan_cost(const TransportPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                 Norm norm);

// Largest absolute deviation of the plan's marginals from the weights.
double marginal_error(const TransportPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

DiscreteMeasure measure_from_json(const std::string& text);
std::string measure_to_json(const DiscreteMeasure& m);
DiscreteMeasure load_measure(const std::string& path);
void save_measure(const std::string& path, const DiscreteMeasure& m);

std::string plan_to_json(const TransportPlan& plan);
void save_plan(const std::string& path, const TransportPlan& plan);

}  // namespace otb
