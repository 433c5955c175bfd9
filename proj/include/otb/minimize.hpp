#pragma once

#include <functional>

namespace otb {

struct Minimum {
  double x = 0.0;
  double f = 0.0;
};

// Golden-section search on [lo, hi]; stops when the bracket is below
// rel_tol * |x|.
Minimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                       double rel_tol = 1e-10);

// Scan `points` nodes on [lo, hi] (log-spaced if requested), then refine
// around the best node with golden-section search.
Minimum scan_then_refine(const std::function<double(double)>& f, double lo, double hi,
                         int points, bool log_spaced, double rel_tol = 1e-10);

}  // namespace otb
