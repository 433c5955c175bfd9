#include "otb/minimize.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace otb {

Minimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                       double rel_tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 500; ++it) {
    if (b - a <= rel_tol * std::max(std::abs(a), std::abs(b)) + 1e-300) break;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  Minimum m;
  if (fc <= fd) {
    m = {c, fc};
  } else {
    m = {d, fd};
  }
  return m;
}

Minimum scan_then_refine(const std::function<double(double)>& f, double lo, double hi,
                         int points, bool log_spaced, double rel_tol) {
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) {
    double t = points == 1 ? 0.0 : double(i) / (points - 1);
    xs[i] = log_spaced ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                       : lo + t * (hi - lo);
  }
  int best = 0;
  double fbest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < points; ++i) {
    double v = f(xs[i]);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  Minimum m{xs[best], fbest};
  if (points < 3) return m;
  double a = xs[best > 0 ? best - 1 : 0];
  double b = xs[best + 1 < points ? best + 1 : points - 1];
  Minimum r = golden_section(f, a, b, rel_tol);
  if (r.f < m.f) m = r;
  return m;
}

}  // namespace otb
