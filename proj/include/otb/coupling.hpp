#pragma once

#include <vector>

#include "otb/measure.hpp"
#include "otb/partition.hpp"

namespace otb {

struct CouplingResult {
  TransportPlan plan;
  std::vector<double> u;        // realized u_l, l = 0..k-1
  std::vector<double> u_bound;  // (1/2) sum_F min(mu F, nu F) sum_C |mu C/mu F - nu C/nu F|
  std::vector<double> delta;    // delta_l, l = 0..k
  double certified_bound = 0.0; // delta_k^p + sum_l delta_l^p u_l
};

CouplingResult hierarchical_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PartitionTree& tree,
                                     double p);

struct AnnulusTerm {
  int shell = 0;
  double mu_mass = 0.0;
  double nu_mass = 0.0;
  double certified = 0.0;  // certified bound of the rescaled shell coupling
};

struct AnnulusResult {
  TransportPlan plan;
  double certified_bound = 0.0;
  std::vector<AnnulusTerm> shells;
};

// Shells G_0 = B(0,1), G_n = B(0,a^n) \ B(0,a^{n-1}); depth < 0 picks default_depth,
// r <= 0 picks default_ratio.
AnnulusResult annulus_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double a, double p, int depth,
                               Norm norm, double r = 0.0);

int shell_index(double radius, double a);

}  // namespace otb
