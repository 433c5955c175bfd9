#pragma once

#include <optional>
#include <string>

namespace otb {

enum class Norm { Max, Euclidean };

enum class Regime { Supercritical, Critical, Subcritical, LowMoment };

std::string to_string(Norm norm);
std::string to_string(Regime regime);
Norm parse_norm(const std::string& s);  // "max" | "euclid"

struct ConstantDetail {
  double value = 0.0;
  Norm norm = Norm::Max;
  std::optional<double> chosen_r;
  std::optional<double> chosen_a;
  bool n_dependent = false;
};

double eps_p(double p);

// H(x, s, q), finite for q > s > 0 and x >= 0.
double h_factor(double x, double s, double q);

struct KdComponents {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
};

KdComponents kd_components(int d);
double kd_upper(int d);

// p == d/2 up to relative 1e-12.
bool is_critical(int d, double p);

// Moment order q must exceed for the non-low-moment bounds: 2p when p >= d/2,
// dp/(d-p) otherwise.
double moment_threshold(int d, double p);

// Upper end of the open low-moment interval (p, min{2p, dp/(d-p)}).
double low_moment_upper(int d, double p);

ConstantDetail kappa_max_norm(int d, double p, std::optional<long long> n = std::nullopt);

// In the critical regime kappa_max_norm(2p, p, N) = a ln N + b once N >= n_floor.
struct CriticalAffine {
  double a = 0.0;
  double b = 0.0;
  long long n_floor = 1;
};
CriticalAffine critical_affine_max_norm(double p);

double kappa_euclidean_r(int d, double p, double r, std::optional<long long> n = std::nullopt);
ConstantDetail kappa_euclidean(int d, double p, std::optional<long long> n = std::nullopt);

// Regime-appropriate H value for the supplied kappa (which encodes norm and N).
double theta_factor(int d, double p, double q, const ConstantDetail& kappa);

// Bracketed prefactor of zeta and the function minimized over a.
double zeta_bracket(int d, double p, double q);
double zeta_a_objective(double p, double q, double a);
ConstantDetail zeta_low_moment(int d, double p, double q);

double gamma_lower_bound(int d, double p);

}  // namespace otb
