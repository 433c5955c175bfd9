#pragma once

namespace otb {

// Psi(x) = sum_{l >= 0} r^{-alpha l} min(1, x r^{beta l}).
struct PsiParams {
  double r = 2.0;
  double alpha = 1.0;
  double beta = 1.0;
  double x = 0.0;
};

void validate(const PsiParams& params);

// Unsaturated prefix summed term by term, saturated tail in closed form.
double psi_exact(const PsiParams& params);

double psi_bound(const PsiParams& params);

}  // namespace otb
