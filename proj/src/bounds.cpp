#include "otb/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

#include "otb/errors.hpp"
#include "otb/minimize.hpp"

namespace otb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Candidate {
  ConstantDetail kappa;
  double theta = 1.0;
  Route route = Route::Native;
  std::optional<double> p_prime;
  double factor = kInf;  // kappa * theta
};

// kappa and theta at exponent pp, for the given route.
Candidate constants_at(int d, double pp, double q, Norm norm, Route route, long long n) {
  Candidate c;
  c.route = route;
  std::optional<long long> nn = n;
  if (norm == Norm::Max) {
    c.kappa = kappa_max_norm(d, pp, nn);
    c.theta = theta_factor(d, pp, q, c.kappa);
  } else if (route == Route::Native) {
    c.kappa = kappa_euclidean(d, pp, nn);
    c.theta = theta_factor(d, pp, q, c.kappa);
  } else {
    ConstantDetail base = kappa_max_norm(d, pp, nn);
    c.theta = theta_factor(d, pp, q, base);
    c.kappa = base;
    c.kappa.norm = Norm::Euclidean;
    c.kappa.value = std::pow(double(d), pp / 2.0) * base.value;
  }
  c.factor = c.kappa.value * c.theta;
  return c;
}

// inf over p' in [p, d/2) of (kappa' theta')^{p/p'}.
Candidate refine_over_p(int d, double p, double q, Norm norm, Route route, long long n, const Candidate& at_p) {
  const double hi = std::min(0.5 * d, q * d / (d + q));
  Candidate best = at_p;
  if (!(hi > p)) return best;
  auto obj = [&](double pp) {
    if (pp < p || !(pp < hi) || is_critical(d, pp)) return kInf;
    try {
      Candidate c = constants_at(d, pp, q, norm, route, n);
      return (p / pp) * std::log(c.factor);
    } catch (const DomainError&) {
      return kInf;
    }
  };
  const int points = 400;
  const double step = (0.5 * d - p) / points;
  int bi = 0;
  double bf = std::log(at_p.factor);
  for (int i = 1; i < points; ++i) {
    double v = obj(p + i * step);
    if (v < bf) {
      bf = v;
      bi = i;
    }
  }
  double bx = p + bi * step;
  double lo = std::max(p, bx - step), up = std::min(hi, bx + step);
  if (up > lo) {
    Minimum m = golden_section(obj, lo, up * (1.0 - 1e-14), 1e-10);
    if (m.f < bf) {
      bf = m.f;
      bx = m.x;
    }
  }
  if (bx == p) {
    best.p_prime = p;
    return best;
  }
  Candidate c = constants_at(d, bx, q, norm, route, n);
  best = c;
  best.kappa.value = std::pow(c.kappa.value, p / bx);
  best.theta = std::pow(c.theta, p / bx);
  best.factor = best.kappa.value * best.theta;
  best.p_prime = bx;
  return best;
}

}  // namespace

LiftPolicy parse_lift(const std::string& s) {
  if (s == "auto") return LiftPolicy::Auto;
  if (s == "native") return LiftPolicy::ForceNative;
  if (s == "sqrtd") return LiftPolicy::ForceLift;
  throw ArgumentError("unknown lift policy '" + s + "' (expected auto, native or sqrtd)");
}

std::string to_string(Route route) { return route == Route::Native ? "native" : "sqrtd-lift"; }

Regime classify_regime(int d, double p, double q) {
  if (d < 1) throw DomainError("dimension must be at least 1");
  if (!(p > 0.0)) throw DomainError("p must be positive");
  if (!(q > 0.0)) throw DomainError("q must be positive");
  const double thr = moment_threshold(d, p);
  if (q > thr) {
    if (is_critical(d, p)) return Regime::Critical;
    return p > 0.5 * d ? Regime::Supercritical : Regime::Subcritical;
  }
  const double low = low_moment_upper(d, p);
  if (q > p && q < low) return Regime::LowMoment;
  if (!(q > p)) throw NoBoundError("no bound available: q = " + num(q) + " must exceed p = " + num(p));
  throw NoBoundError("no bound available: q = " + num(q) + " must exceed " + num(thr) +
                     (p >= 0.5 * d ? " (= 2p)" : " (= dp/(d-p))") + " or lie below " + num(low));
}

double rate_exponent(Regime regime, int d, double p, double q) {
  switch (regime) {
    case Regime::Supercritical:
    case Regime::Critical:
      return 0.5;
    case Regime::Subcritical:
      return p / d;
    case Regime::LowMoment:
      return (q - p) / q;
  }
  return 0.5;
}

BoundReport evaluate_bound(const BoundQuery& qr) {
  if (!(qr.moment >= 0.0)) throw DomainError("moment must be nonnegative");
  if (qr.n < 1) throw DomainError("n must be at least 1");
  BoundReport rep;
  rep.regime = classify_regime(qr.d, qr.p, qr.q);
  rep.rate_exponent = rate_exponent(rep.regime, qr.d, qr.p, qr.q);
  const double mfac = std::isinf(qr.q) ? (qr.moment > 0.0 ? 1.0 : 0.0) : std::pow(qr.moment, qr.p / qr.q);
  const double scale = std::exp2(qr.p) * mfac * std::pow(double(qr.n), -rep.rate_exponent);

  if (rep.regime == Regime::LowMoment) {
    if (qr.norm == Norm::Euclidean) throw NoBoundError("low-moment bound is only available for the max norm");
    if (qr.lift_policy == LiftPolicy::ForceLift) throw ArgumentError("lift applies to the Euclidean norm only");
    rep.kappa = zeta_low_moment(qr.d, qr.p, qr.q);
    rep.theta = 1.0;
    rep.route = Route::Native;
  } else {
    std::vector<Route> routes;
    if (qr.norm == Norm::Max) {
      if (qr.lift_policy == LiftPolicy::ForceLift) throw ArgumentError("lift applies to the Euclidean norm only");
      routes.push_back(Route::Native);
    } else {
      if (qr.lift_policy != LiftPolicy::ForceLift) {
        if (qr.d >= 8) {
          routes.push_back(Route::Native);
        } else if (qr.lift_policy == LiftPolicy::ForceNative) {
          throw UnsupportedDimensionError("native Euclidean constant needs d >= 8");
        }
      }
      if (qr.lift_policy != LiftPolicy::ForceNative) routes.push_back(Route::SqrtDLift);
    }
    Candidate best;
    for (Route r : routes) {
      Candidate c = constants_at(qr.d, qr.p, qr.q, qr.norm, r, qr.n);
      if (qr.refine_p && rep.regime == Regime::Subcritical) {
        c = refine_over_p(qr.d, qr.p, qr.q, qr.norm, r, qr.n, c);
      }
      if (c.factor < best.factor) best = c;
    }
    rep.kappa = best.kappa;
    rep.theta = best.theta;
    rep.route = best.route;
    rep.chosen_p_prime = best.p_prime;
  }
  rep.value = scale * rep.kappa.value * rep.theta;

  std::ostringstream os;
  os << "2^p * kappa * theta * M^(p/q) * n^-rate = 2^" << num(qr.p) << " * " << num(rep.kappa.value) << " * "
     << num(rep.theta) << " * " << num(mfac) << " * " << qr.n << "^-" << num(rep.rate_exponent) << " = "
     << num(rep.value);
  rep.formula_text = os.str();
  return rep;
}

double min_q_for_theta(int d, double p, double c, Norm norm, std::optional<long long> n, bool root) {
  if (!(c > 1.0)) throw UnreachableTargetError("target c must exceed 1 since theta > 1");
  if (is_critical(d, p) && !n) n = 100;
  ConstantDetail kappa = norm == Norm::Max ? kappa_max_norm(d, p, n) : kappa_euclidean(d, p, n);
  const double thr = moment_threshold(d, p);
  auto ok = [&](long long k) {
    double q = k / 10.0;
    double t = theta_factor(d, p, q, kappa);
    return (root ? std::pow(t, 1.0 / p) : t) <= c;
  };
  long long k = static_cast<long long>(std::floor(thr * 10.0));
  while (!(k / 10.0 > thr)) ++k;
  if (ok(k)) return k / 10.0;
  // theta is decreasing in q: gallop for an upper end then bisect.
  long long lo = k, step = 1, hi = k + 1;
  while (!ok(hi)) {
    lo = hi;
    step *= 2;
    hi = k + step;
    if (step > (1LL << 40)) throw UnreachableTargetError("target c too close to 1");
  }
  while (hi - lo > 1) {
    long long mid = lo + (hi - lo) / 2;
    if (ok(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi / 10.0;
}

}  // namespace otb
