#include "otb/constants.hpp"

#include <cmath>
#include <limits>

#include "otb/errors.hpp"
#include "otb/minimize.hpp"

namespace otb {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_plus(double x) { return x > 1.0 ? std::log(x) : 0.0; }

// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log(1 - exp(t)) for t < 0.
double log1m_exp(double t) {
  return t > -kLn2 ? std::log(-std::expm1(t)) : std::log1p(-std::exp(t));
}

void require_positive_p(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("p must be positive and finite");
}

void require_dim(int d) {
  if (d < 1) throw DomainError("dimension must be at least 1");
}

long long require_n(std::optional<long long> n) {
  if (!n) throw ArgumentError("sample size n is required when p = d/2");
  if (*n < 1) throw DomainError("sample size n must be at least 1");
  return *n;
}

}  // namespace

std::string to_string(Norm norm) { return norm == Norm::Max ? "max" : "euclid"; }

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Supercritical:
      return "supercritical";
    case Regime::Critical:
      return "critical";
    case Regime::Subcritical:
      return "subcritical";
    case Regime::LowMoment:
      return "low-moment";
  }
  return "?";
}

Norm parse_norm(const std::string& s) {
  if (s == "max") return Norm::Max;
  if (s == "euclid") return Norm::Euclidean;
  throw ArgumentError("unknown norm '" + s + "' (expected max or euclid)");
}

double eps_p(double p) {
  require_positive_p(p);
  return std::max(0.5, std::exp2(-p));
}

double h_factor(double x, double s, double q) {
  if (!(s > 0.0)) throw DomainError("H requires s > 0");
  if (!(q > s)) throw DomainError("H requires q > s");
  if (!(x >= 0.0)) throw DomainError("H requires x >= 0");
  if (std::isinf(q)) return 1.0;
  double a = x > 0.0 ? std::log(x) + std::log(q - s) - std::log(s) : -kInf;
  double b = std::log1p(x) + (q / (q - s)) * std::log(q / s);
  return std::exp((s / q) * log_add(a, b) + std::log(q) - std::log(q - s));
}

KdComponents kd_components(int d) {
  if (d < 8) throw UnsupportedDimensionError("K_d bound needs d >= 8, got d = " + std::to_string(d));
  const double dd = d;
  const double L = std::log(dd), LL = std::log(L);
  const double pi = std::acos(-1.0);
  const double tail = std::log(pi * std::sqrt(2.0 * dd) / (std::sqrt(pi * dd) - 2.0));
  const double den = (1.0 - 2.0 / L) * (1.0 - 2.0 / std::sqrt(pi * dd));
  KdComponents k;
  k.k1 = dd * dd * (L + LL + 5.0);
  k.k2 = std::pow(7.0, 4.0 * std::log(7.0) / 7.0) / 4.0 * std::sqrt(pi / 2.0) *
         std::pow(dd, 1.5) * (2.0 * (dd - 1.0) * L + 0.5 * L + tail) / (den * L * L);
  k.k3 = std::sqrt(2.0 * pi * dd) *
         ((dd - 1.0) * std::log(2.0 * dd) + (dd - 1.0) * LL + 0.5 * L + tail) / den;
  return k;
}

double kd_upper(int d) {
  KdComponents k = kd_components(d);
  return std::max(k.k1, std::max(k.k2, k.k3));
}

bool is_critical(int d, double p) {
  double half = 0.5 * d;
  return std::abs(p - half) <= 1e-12 * half;
}

double moment_threshold(int d, double p) {
  require_dim(d);
  require_positive_p(p);
  if (is_critical(d, p) || p > 0.5 * d) return 2.0 * p;
  return d * p / (d - p);
}

double low_moment_upper(int d, double p) {
  require_dim(d);
  require_positive_p(p);
  double u = 2.0 * p;
  if (p < d) u = std::min(u, d * p / (d - p));
  return u;
}

ConstantDetail kappa_max_norm(int d, double p, std::optional<long long> n) {
  require_dim(d);
  require_positive_p(p);
  ConstantDetail c;
  c.norm = Norm::Max;
  const double half = 0.5 * d;
  if (is_critical(d, p)) {
    long long N = require_n(n);
    double arg = (std::exp2(1.0 - p) - std::exp2(1.0 - 2.0 * p)) * std::sqrt(double(N));
    c.value = std::exp2(p - 1.0) / (p * kLn2) * log_plus(arg) + std::exp2(p - 1.0) / (1.0 - std::exp2(-p));
    c.n_dependent = true;
  } else if (p > half) {
    c.value = std::exp((half - 1.0) * kLn2 - log1m_exp((half - p) * kLn2));
  } else {
    double lg = (p - 2.0 * p / d) * kLn2 + (1.0 - 2.0 * p / d) * log1m_exp(-half * kLn2) -
                log1m_exp((p - half) * kLn2);
    c.value = std::exp(lg);
  }
  return c;
}

CriticalAffine critical_affine_max_norm(double p) {
  require_positive_p(p);
  const double c = std::exp2(1.0 - p) - std::exp2(1.0 - 2.0 * p);
  const double coef = std::exp2(p - 1.0) / (p * kLn2);
  CriticalAffine a;
  a.a = 0.5 * coef;
  a.b = coef * std::log(c) + std::exp2(p - 1.0) / (1.0 - std::exp2(-p));
  a.n_floor = static_cast<long long>(std::ceil(1.0 / (c * c) - 1e-12));
  if (a.n_floor < 1) a.n_floor = 1;
  return a;
}

double kappa_euclidean_r(int d, double p, double r, std::optional<long long> n) {
  require_positive_p(p);
  if (!(r > 2.0)) throw DomainError("Euclidean ratio r must exceed 2");
  const double K = kd_upper(d);
  const double lnK = std::log(K);
  const double lr = std::log(r), lr2 = std::log(r - 2.0);
  const double half = 0.5 * d;
  if (is_critical(d, p)) {
    long long N = require_n(n);
    double larg = kLn2 + p * lr2 - 2.0 * p * lr + log1m_exp(-p * lr) + 0.5 * (std::log(double(N)) - lnK);
    double first = 0.0;
    if (larg > 0.0) first = std::exp(0.5 * lnK - kLn2 + 2.0 * p * lr - p * lr2 - std::log(p * lr)) * larg;
    double second = std::exp(0.5 * lnK - kLn2 + 3.0 * p * lr - p * lr2 - (p * lr + log1m_exp(-p * lr)));
    return first + second;
  }
  if (p > half) {
    return std::exp(0.5 * lnK - kLn2 + d * lr - half * lr2 - log1m_exp((half - p) * lr));
  }
  double lg = (p / d) * (lnK - 2.0 * kLn2) + 2.0 * p * lr + (1.0 - 2.0 * p / d) * log1m_exp(-half * lr) -
              p * lr2 - log1m_exp((p - half) * lr);
  return std::exp(lg);
}

ConstantDetail kappa_euclidean(int d, double p, std::optional<long long> n) {
  if (d < 8) throw UnsupportedDimensionError("Euclidean constant needs d >= 8, got d = " + std::to_string(d));
  require_positive_p(p);
  if (is_critical(d, p)) require_n(n);
  auto f = [&](double r) {
    double v = kappa_euclidean_r(d, p, r, n);
    return std::isfinite(v) ? std::log(v) : kInf;
  };
  Minimum m = scan_then_refine(f, 2.001, 1000.0, 200, true, 1e-10);
  ConstantDetail c;
  c.norm = Norm::Euclidean;
  c.value = std::exp(m.f);
  c.chosen_r = m.x;
  c.n_dependent = is_critical(d, p);
  return c;
}

double theta_factor(int d, double p, double q, const ConstantDetail& kappa) {
  require_dim(d);
  require_positive_p(p);
  const double thr = moment_threshold(d, p);
  if (!(q > thr)) throw DomainError("theta requires q above the moment threshold " + std::to_string(thr));
  if (!(kappa.value > 0.0)) throw DomainError("kappa must be positive");
  if (is_critical(d, p) || p > 0.5 * d) return h_factor(eps_p(p) / kappa.value, 2.0 * p, q);
  return h_factor(std::exp2(1.0 - 2.0 * p / d) * eps_p(p) / kappa.value, thr, q);
}

double zeta_bracket(int d, double p, double q) {
  const double e = double(d) - p - d * p / q;
  double first = eps_p(p) * std::exp2(2.0 * p / q - 1.0);
  double lbase = (d - 1.0) * kLn2 - log1m_exp(-0.5 * d * kLn2) - 0.5 * d * kLn2;
  double second = std::exp(2.0 * (q - p) / q * lbase) * (1.0 - std::exp2(-p)) / -std::expm1(e * kLn2);
  return first + second;
}

double zeta_a_objective(double p, double q, double a) {
  double la = std::log(a);
  return std::exp(p * la) / std::expm1((p - 0.5 * q) * la) + std::exp(p * la) / -std::expm1((p - q) * la);
}

ConstantDetail zeta_low_moment(int d, double p, double q) {
  require_dim(d);
  require_positive_p(p);
  const double hi = low_moment_upper(d, p);
  if (!(q > p && q < hi))
    throw DomainError("low-moment constant needs q in (" + std::to_string(p) + ", " + std::to_string(hi) + ")");
  auto f = [&](double a) {
    double v = zeta_a_objective(p, q, a);
    return std::isfinite(v) ? std::log(v) : kInf;
  };
  Minimum m = scan_then_refine(f, 1.0001, 1000.0, 200, true, 1e-10);
  ConstantDetail c;
  c.norm = Norm::Max;
  c.value = zeta_bracket(d, p, q) * std::exp(m.f);
  c.chosen_a = m.x;
  return c;
}

double gamma_lower_bound(int d, double p) {
  require_dim(d);
  require_positive_p(p);
  return std::tgamma(1.0 + p / d) * std::exp2(-p);
}

}  // namespace otb
