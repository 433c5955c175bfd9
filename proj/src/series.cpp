#include "otb/series.hpp"

#include <cmath>

#include "otb/errors.hpp"

namespace otb {

void validate(const PsiParams& pp) {
  if (!(pp.r > 1.0)) throw DomainError("Psi requires r > 1");
  if (!(pp.alpha > 0.0)) throw DomainError("Psi requires alpha > 0");
  if (!(pp.beta >= pp.alpha)) throw DomainError("Psi requires beta >= alpha");
  if (!(pp.x >= 0.0)) throw DomainError("Psi requires x >= 0");
}

double psi_exact(const PsiParams& pp) {
  validate(pp);
  if (pp.x == 0.0) return 0.0;
  const double lr = std::log(pp.r);
  // First level at which x r^{beta l} >= 1.
  double l0 = pp.x >= 1.0 ? 0.0 : std::ceil(std::log(1.0 / pp.x) / (pp.beta * lr));
  double tail = std::exp(-pp.alpha * l0 * lr) / -std::expm1(-pp.alpha * lr);
  double prefix = 0.0;
  if (l0 <= 1e6) {
    const long long L = static_cast<long long>(l0);
    for (long long l = L - 1; l >= 0; --l) {
      double t = std::exp(-pp.alpha * l * lr) * std::min(1.0, pp.x * std::exp(pp.beta * l * lr));
      prefix += t;
    }
  } else {
    double g = (pp.beta - pp.alpha) * lr;
    prefix = g == 0.0 ? pp.x * l0 : pp.x * std::expm1(g * l0) / std::expm1(g);
  }
  return prefix + tail;
}

double psi_bound(const PsiParams& pp) {
  validate(pp);
  if (pp.x == 0.0) return 0.0;
  const double lr = std::log(pp.r);
  const double geo = 1.0 / -std::expm1(-pp.alpha * lr);
  if (pp.beta == pp.alpha) {
    double lp = pp.x < 1.0 ? std::log(1.0 / pp.x) : 0.0;
    return (lp / (pp.beta * lr) + geo) * pp.x;
  }
  return (1.0 / std::expm1((pp.beta - pp.alpha) * lr) + geo) * std::pow(pp.x, pp.alpha / pp.beta);
}

}  // namespace otb
