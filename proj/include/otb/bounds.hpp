#pragma once

#include <optional>
#include <string>

#include "otb/constants.hpp"

namespace otb {

enum class LiftPolicy { Auto, ForceNative, ForceLift };
enum class Route { Native, SqrtDLift };

LiftPolicy parse_lift(const std::string& s);  // "auto" | "native" | "sqrtd"
std::string to_string(Route route);

struct BoundQuery {
  int d = 1;
  double p = 1.0;
  double q = 0.0;
  double moment = 0.0;
  Norm norm = Norm::Max;
  long long n = 1;
  bool refine_p = false;
  LiftPolicy lift_policy = LiftPolicy::Auto;
};

// value == 2^p * kappa.value * theta * moment^{p/q} * n^{-rate_exponent}.
// After p-refinement kappa.value and theta hold kappa'^{p/p'} and theta'^{p/p'};
// on the lifted route kappa.value is d^{p/2} times the max-norm constant.
struct BoundReport {
  double value = 0.0;
  Regime regime = Regime::Subcritical;
  double rate_exponent = 0.5;
  ConstantDetail kappa;
  double theta = 1.0;
  std::optional<double> chosen_p_prime;
  Route route = Route::Native;
  std::string formula_text;
};

Regime classify_regime(int d, double p, double q);

double rate_exponent(Regime regime, int d, double p, double q);

BoundReport evaluate_bound(const BoundQuery& query);

// Smallest q on the 0.1 grid with theta <= c (theta^{1/p} <= c when root).
// Critical cells use n (default 100).
double min_q_for_theta(int d, double p, double c, Norm norm, std::optional<long long> n = std::nullopt,
                       bool root = false);

}  // namespace otb
