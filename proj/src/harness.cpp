#include "otb/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "otb/bounds.hpp"
#include "otb/errors.hpp"
#include "otb/minimize.hpp"
#include "otb/ot.hpp"
#include "otb/parallel.hpp"
#include "otb/rng.hpp"

namespace otb {

namespace {

DiscreteMeasure grid_uniform(int d, int k, Norm norm) {
  if (k < 1) throw ArgumentError("points_per_axis must be at least 1");
  std::vector<double> axis(k);
  for (int i = 0; i < k; ++i) axis[i] = (i + 0.5) / k - 0.5;
  std::vector<double> coords;
  std::vector<int> idx(d, 0);
  for (;;) {
    std::vector<double> x(d);
    for (int j = 0; j < d; ++j) x[j] = axis[idx[j]];
    if (norm == Norm::Max || norm_of(x.data(), d, norm) <= 0.5) coords.insert(coords.end(), x.begin(), x.end());
    int j = 0;
    while (j < d && ++idx[j] == k) idx[j++] = 0;
    if (j == d) break;
  }
  std::size_t n = coords.size() / d;
  if (n == 0) throw ArgumentError("grid has no point inside the ball");
  return DiscreteMeasure(d, std::move(coords), std::vector<double>(n, 1.0 / double(n)));
}

// Radial Pareto on shells [s a^k, s a^{k+1}); each shell mass is spread over
// the 3^d - 1 directions {-1,0,1}^d \ {0} at max-norm radius s a^{k+1/2}.
DiscreteMeasure scaled_pareto(const DistributionSpec& ds) {
  if (!(ds.tail_index > 0.0) || !(ds.scale > 0.0) || !(ds.shell_ratio > 1.0) || !(ds.truncation > 0.0))
    throw ArgumentError("invalid scaled_pareto parameters");
  const int d = ds.dim;
  std::vector<std::vector<double>> dirs;
  std::vector<int> idx(d, -1);
  for (;;) {
    bool zero = true;
    for (int v : idx) zero = zero && v == 0;
    if (!zero) dirs.emplace_back(idx.begin(), idx.end());
    int j = 0;
    while (j < d && ++idx[j] == 2) idx[j++] = -1;
    if (j == d) break;
  }
  if (ds.norm == Norm::Euclidean)
    for (auto& v : dirs) {
      double s = norm_of(v.data(), d, Norm::Euclidean);
      for (double& c : v) c /= s;
    }
  auto tail = [&](double t) { return std::pow(t / ds.scale, -ds.tail_index); };
  std::vector<double> coords, w;
  for (int k = 0; k < 10000; ++k) {
    double r0 = ds.scale * std::pow(ds.shell_ratio, k), r1 = r0 * ds.shell_ratio;
    if (tail(r0) < ds.truncation) break;
    double mass = tail(r0) - tail(r1);
    double rad = r0 * std::sqrt(ds.shell_ratio);
    for (const auto& v : dirs) {
      for (double c : v) coords.push_back(c * rad);
      w.push_back(mass / double(dirs.size()));
    }
  }
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return DiscreteMeasure(d, std::move(coords), std::move(w));
}

double moment_about(const DiscreteMeasure& m, double q, Norm norm, const std::vector<double>& x0) {
  std::vector<double> terms(m.size());
  std::vector<double> y(m.dim());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (int k = 0; k < m.dim(); ++k) y[k] = m.point(i)[k] - x0[k];
    terms[i] = m.weight(i) * std::pow(norm_of(y.data(), m.dim(), norm), q);
  }
  return pairwise_sum(terms.data(), terms.size());
}

double fmt_slope(double x) { return std::isfinite(x) ? x : NAN; }

}  // namespace

DiscreteMeasure materialize(const DistributionSpec& ds) {
  switch (ds.kind) {
    case DistributionKind::FiniteSupport:
      if (ds.support.size() == 0) throw ArgumentError("finite_support distribution without atoms");
      return ds.support;
    case DistributionKind::GridUniform:
      return grid_uniform(ds.dim, ds.points_per_axis, ds.norm);
    case DistributionKind::ScaledPareto:
      return scaled_pareto(ds);
  }
  throw ArgumentError("unknown distribution kind");
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double exact_moment(const DiscreteMeasure& m, double q, Norm norm) {
  if (!(q > 0.0)) throw DomainError("moment order q must be positive");
  return moment_about(m, q, norm, std::vector<double>(m.dim(), 0.0));
}

double exact_moment(const DistributionSpec& dist, double q, Norm norm) { return exact_moment(materialize(dist), q, norm); }

MomentResult translation_optimized_moment(const DiscreteMeasure& m, double q, Norm norm) {
  if (!(q > 0.0)) throw DomainError("moment order q must be positive");
  const int d = m.dim();
  MomentResult res;
  res.plain = exact_moment(m, q, norm);
  std::vector<double> x0(d, 0.0), lo(d), hi(d);
  for (int k = 0; k < d; ++k) {
    lo[k] = hi[k] = m.point(0)[k];
    for (std::size_t i = 1; i < m.size(); ++i) {
      lo[k] = std::min(lo[k], m.point(i)[k]);
      hi[k] = std::max(hi[k], m.point(i)[k]);
    }
  }
  // Work in log space: moments of high order under- or overflow otherwise.
  auto lval = [&](const std::vector<double>& x) { return std::log(moment_about(m, q, norm, x)); };
  double best = lval(x0);
  for (int sweep = 0; sweep < 30; ++sweep) {
    double before = best;
    for (int k = 0; k < d; ++k) {
      if (!(hi[k] > lo[k])) continue;
      auto f = [&](double t) {
        std::vector<double> x = x0;
        x[k] = t;
        return lval(x);
      };
      Minimum mk = scan_then_refine(f, lo[k], hi[k], 41, false, 1e-10);
      if (mk.f < best) {
        best = mk.f;
        x0[k] = mk.x;
      }
    }
    if (!(best < before - 1e-14 * std::abs(before))) break;
  }
  res.optimized = std::min(res.plain, std::exp(best));
  res.center = res.optimized < res.plain ? x0 : std::vector<double>(d, 0.0);
  return res;
}

namespace {

std::vector<long long> sample_counts(const AliasTable& table, long long n, std::uint64_t seed, std::uint64_t replica) {
  CounterRng rng(seed, replica);
  std::vector<long long> counts(table.size(), 0);
  for (long long i = 0; i < n; ++i) ++counts[table.sample(rng)];
  return counts;
}

DiscreteMeasure counts_to_measure(const DiscreteMeasure& dist, const std::vector<long long>& counts, long long n) {
  std::vector<double> c, w;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    c.insert(c.end(), dist.point(i), dist.point(i) + dist.dim());
    w.push_back(double(counts[i]) / double(n));
  }
  return DiscreteMeasure(dist.dim(), std::move(c), std::move(w));
}

}  // namespace

DiscreteMeasure sample_empirical(const DiscreteMeasure& dist, long long n, std::uint64_t seed,
                                 std::uint64_t replica_index) {
  if (n < 1) throw ArgumentError("sample size must be at least 1");
  AliasTable table(dist.weights());
  return counts_to_measure(dist, sample_counts(table, n, seed, replica_index), n);
}

DiscreteMeasure sample_empirical(const DistributionSpec& dist, long long n, std::uint64_t seed,
                                 std::uint64_t replica_index) {
  return sample_empirical(materialize(dist), n, seed, replica_index);
}

CostEstimate estimate_expected_cost(const DiscreteMeasure& dist, long long n, double p, Norm norm, int replicas,
                                    std::uint64_t seed, unsigned threads) {
  if (replicas < 1) throw ArgumentError("replicas must be at least 1");
  if (n < 1) throw ArgumentError("sample size must be at least 1");
  const std::size_t K = dist.size();
  const std::vector<double> full = cost_matrix(dist, dist, p, norm);
  AliasTable table(dist.weights());
  CostEstimate est;
  est.values.assign(replicas, 0.0);
  parallel_for(
      std::size_t(replicas),
      [&](std::size_t r) {
        std::vector<long long> counts = sample_counts(table, n, seed, r);
        std::vector<std::size_t> rows;
        std::vector<double> a;
        for (std::size_t i = 0; i < K; ++i)
          if (counts[i] > 0) {
            rows.push_back(i);
            a.push_back(double(counts[i]) / double(n));
          }
        std::vector<double> sub(rows.size() * K);
        for (std::size_t i = 0; i < rows.size(); ++i)
          std::copy(full.begin() + rows[i] * K, full.begin() + (rows[i] + 1) * K, sub.begin() + i * K);
        OtResult res = solve_transport(sub, rows.size(), K, a, dist.weights());
        if (!res.certified) throw Error("network simplex failed to certify optimality");
        est.values[r] = res.cost;
      },
      threads);
  est.mean = pairwise_sum(est.values.data(), est.values.size()) / replicas;
  if (replicas > 1) {
    std::vector<double> dev(replicas);
    for (int r = 0; r < replicas; ++r) dev[r] = (est.values[r] - est.mean) * (est.values[r] - est.mean);
    est.stderr_ = std::sqrt(pairwise_sum(dev.data(), dev.size()) / (replicas - 1) / replicas);
  }
  return est;
}

CostEstimate estimate_expected_cost(const DistributionSpec& dist, long long n, double p, Norm norm, int replicas,
                                    std::uint64_t seed, unsigned threads) {
  return estimate_expected_cost(materialize(dist), n, p, norm, replicas, seed, threads);
}

SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  SlopeFit f;
  if (m < 2 || y.size() != m) return {NAN, NAN};
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  f.slope = sxy / sxx;
  if (m > 2) {
    double ssr = 0;
    for (std::size_t i = 0; i < m; ++i) {
      double e = ly[i] - my - f.slope * (lx[i] - mx);
      ssr += e * e;
    }
    f.stderr_ = std::sqrt(ssr / double(m - 2) / sxx);
  } else {
    f.stderr_ = NAN;
  }
  return f;
}

bool VerifyReport::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

VerifyConfig config_from_json(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::exception& e) {
    throw ArgumentError(std::string("invalid config JSON: ") + e.what());
  }
  try {
    VerifyConfig c;
    c.name = j.value("name", std::string());
    const auto& dj = j.at("distribution");
    DistributionSpec& ds = c.distribution;
    std::string kind = dj.at("kind").get<std::string>();
    ds.dim = dj.value("dim", 1);
    ds.norm = parse_norm(dj.value("norm", j.value("norm", std::string("max"))));
    if (kind == "finite_support") {
      ds.kind = DistributionKind::FiniteSupport;
      ds.support = measure_from_json(dj.at("measure").dump());
      ds.dim = ds.support.dim();
    } else if (kind == "grid_uniform") {
      ds.kind = DistributionKind::GridUniform;
      ds.points_per_axis = dj.value("points_per_axis", 8);
    } else if (kind == "scaled_pareto") {
      ds.kind = DistributionKind::ScaledPareto;
      ds.tail_index = dj.value("tail_index", ds.tail_index);
      ds.scale = dj.value("scale", ds.scale);
      ds.shell_ratio = dj.value("shell_ratio", ds.shell_ratio);
      ds.truncation = dj.value("truncation", ds.truncation);
    } else {
      throw ArgumentError("unknown distribution kind '" + kind + "'");
    }
    c.p = j.at("p").get<double>();
    c.q = j.at("q").get<double>();
    c.norm = parse_norm(j.value("norm", std::string("max")));
    c.n_values = j.at("n_values").get<std::vector<long long>>();
    c.replicas = j.value("replicas", c.replicas);
    c.seed = j.value("seed", c.seed);
    c.confidence_sigmas = j.value("confidence_sigmas", c.confidence_sigmas);
    c.refine_p = j.value("refine_p", false);
    c.optimize_moment = j.value("optimize_moment", false);
    if (c.n_values.empty()) throw ArgumentError("n_values must not be empty");
    for (long long n : c.n_values)
      if (n < 1) throw ArgumentError("every n must be at least 1");
    if (c.replicas < 1) throw ArgumentError("replicas must be at least 1");
    return c;
  } catch (const nlohmann::ordered_json::exception& e) {
    throw ArgumentError(std::string("invalid config: ") + e.what());
  }
}

VerifyConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

VerifyReport run_verification(const VerifyConfig& c, unsigned threads) {
  DiscreteMeasure dist = materialize(c.distribution);
  VerifyReport rep;
  rep.name = c.name;
  rep.regime = classify_regime(dist.dim(), c.p, c.q);
  rep.expected_slope = -rate_exponent(rep.regime, dist.dim(), c.p, c.q);
  rep.discretized_target = c.distribution.kind == DistributionKind::GridUniform;
  rep.moment = c.optimize_moment ? translation_optimized_moment(dist, c.q, c.norm).optimized
                                 : exact_moment(dist, c.q, c.norm);
  std::vector<double> xs, ys;
  for (long long n : c.n_values) {
    BoundQuery bq;
    bq.d = dist.dim();
    bq.p = c.p;
    bq.q = c.q;
    bq.moment = rep.moment;
    bq.norm = c.norm;
    bq.n = n;
    bq.refine_p = c.refine_p;
    VerifyRow row;
    row.n = n;
    row.bound = evaluate_bound(bq).value;
    CostEstimate e = estimate_expected_cost(dist, n, c.p, c.norm, c.replicas, c.seed, threads);
    row.mean = e.mean;
    row.stderr_ = e.stderr_;
    row.margin = row.bound - (row.mean + c.confidence_sigmas * row.stderr_);
    row.pass = row.margin >= 0.0;
    rep.rows.push_back(row);
    xs.push_back(double(n));
    ys.push_back(row.mean);
  }
  SlopeFit f = fit_log_slope(xs, ys);
  rep.slope = fmt_slope(f.slope);
  rep.slope_stderr = fmt_slope(f.stderr_);
  return rep;
}

std::string report_text(const VerifyReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "config: " << (r.name.empty() ? "(unnamed)" : r.name) << "\n";
  os << "regime: " << to_string(r.regime) << (r.discretized_target ? "  (discretized target)" : "") << "\n";
  os << "moment: " << r.moment << "\n";
  os << std::left << std::setw(8) << "n" << std::setw(14) << "mean" << std::setw(14) << "stderr" << std::setw(14)
     << "bound" << std::setw(14) << "margin" << "pass\n";
  for (const auto& row : r.rows)
    os << std::setw(8) << row.n << std::setw(14) << row.mean << std::setw(14) << row.stderr_ << std::setw(14)
       << row.bound << std::setw(14) << row.margin << (row.pass ? "yes" : "NO") << "\n";
  os << "slope: " << r.slope << " +/- " << r.slope_stderr << " (rate " << r.expected_slope << ")\n";
  os << "verdict: " << (r.all_pass() ? "pass" : "FAIL") << "\n";
  return os.str();
}

std::string report_csv(const VerifyReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "n,mean,stderr,bound,margin,pass\n";
  for (const auto& row : r.rows)
    os << row.n << ',' << row.mean << ',' << row.stderr_ << ',' << row.bound << ',' << row.margin << ','
       << (row.pass ? "true" : "false") << "\n";
  return os.str();
}

std::string report_json(const VerifyReport& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n},
                    {"mean", row.mean},
                    {"stderr", row.stderr_},
                    {"bound", row.bound},
                    {"margin", row.margin},
                    {"pass", row.pass}});
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j = {{"name", r.name},
                      {"regime", to_string(r.regime)},
                      {"discretized_target", r.discretized_target},
                      {"moment", r.moment},
                      {"rows", rows},
                      {"slope", num(r.slope)},
                      {"slope_stderr", num(r.slope_stderr)},
                      {"expected_slope", r.expected_slope},
                      {"pass", r.all_pass()}};
  return j.dump(2) + "\n";
}

}  // namespace otb
