#include "otb/measure.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "otb/errors.hpp"

namespace otb {

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<double> coords, std::vector<double> weights) : dim_(dim) {
  if (dim < 1) throw ArgumentError("measure dimension must be at least 1");
  if (coords.size() != weights.size() * std::size_t(dim))
    throw ArgumentError("measure has " + std::to_string(coords.size()) + " coordinates for " +
                        std::to_string(weights.size()) + " points in dimension " + std::to_string(dim));
  if (weights.empty()) throw NormalizationError("measure has no atoms");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw NormalizationError("weights must be finite and nonnegative");
    total += w;
  }
  for (double c : coords)
    if (!std::isfinite(c)) throw ArgumentError("coordinates must be finite");
  if (std::abs(total - 1.0) > 1e-9) throw NormalizationError("weights sum to " + std::to_string(total) + ", not 1");

  std::map<std::vector<double>, std::size_t> seen;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    std::vector<double> key(coords.begin() + i * dim, coords.begin() + (i + 1) * dim);
    for (double& k : key)
      if (k == 0.0) k = 0.0;  // fold -0 into +0
    auto [it, fresh] = seen.emplace(key, weights_.size());
    if (fresh) {
      coords_.insert(coords_.end(), key.begin(), key.end());
      weights_.push_back(weights[i]);
    } else {
      weights_[it->second] += weights[i];
    }
  }
}

DiscreteMeasure DiscreteMeasure::dirac(std::vector<double> point) {
  int d = int(point.size());
  return DiscreteMeasure(d, std::move(point), {1.0});
}

DiscreteMeasure DiscreteMeasure::scaled(double alpha) const {
  DiscreteMeasure m = *this;
  for (double& c : m.coords_) c *= alpha;
  return m;
}

double norm_of(const double* x, int dim, Norm norm) {
  double s = 0.0;
  if (norm == Norm::Max) {
    for (int k = 0; k < dim; ++k) s = std::max(s, std::abs(x[k]));
    return s;
  }
  for (int k = 0; k < dim; ++k) s += x[k] * x[k];
  return std::sqrt(s);
}

double distance(const double* x, const double* y, int dim, Norm norm) {
  double s = 0.0;
  if (norm == Norm::Max) {
    for (int k = 0; k < dim; ++k) s = std::max(s, std::abs(x[k] - y[k]));
    return s;
  }
  for (int k = 0; k < dim; ++k) s += (x[k] - y[k]) * (x[k] - y[k]);
  return std::sqrt(s);
}

double plan_cost(const TransportPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                 Norm norm) {
  double c = 0.0;
  for (const Triple& t : plan.triples) c += t.mass * std::pow(distance(mu.point(t.i), nu.point(t.j), mu.dim(), norm), p);
  return c;
}

double marginal_error(const TransportPlan& plan, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<double> a(mu.size(), 0.0), b(nu.size(), 0.0);
  for (const Triple& t : plan.triples) {
    a[t.i] += t.mass;
    b[t.j] += t.mass;
  }
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - mu.weight(i)));
  for (std::size_t j = 0; j < b.size(); ++j) e = std::max(e, std::abs(b[j] - nu.weight(j)));
  return e;
}

DiscreteMeasure measure_from_json(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::exception& e) {
    throw ArgumentError(std::string("invalid measure JSON: ") + e.what());
  }
  if (!j.contains("dim") || !j.contains("points") || !j.contains("weights"))
    throw ArgumentError("measure JSON needs \"dim\", \"points\" and \"weights\"");
  int dim = j["dim"].get<int>();
  std::vector<double> coords;
  for (const auto& pt : j["points"]) {
    if (!pt.is_array() || int(pt.size()) != dim) throw ArgumentError("every point needs exactly dim coordinates");
    for (const auto& c : pt) coords.push_back(c.get<double>());
  }
  std::vector<double> w = j["weights"].get<std::vector<double>>();
  return DiscreteMeasure(dim, std::move(coords), std::move(w));
}

std::string measure_to_json(const DiscreteMeasure& m) {
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.size(); ++i) pts.push_back(std::vector<double>(m.point(i), m.point(i) + m.dim()));
  nlohmann::ordered_json j = {{"dim", m.dim()}, {"points", pts}, {"weights", m.weights()}};
  return j.dump() + "\n";
}

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write " + path);
  out << text;
}
}  // namespace

DiscreteMeasure load_measure(const std::string& path) { return measure_from_json(slurp(path)); }
void save_measure(const std::string& path, const DiscreteMeasure& m) { spit(path, measure_to_json(m)); }

std::string plan_to_json(const TransportPlan& plan) {
  nlohmann::ordered_json tr = nlohmann::ordered_json::array();
  for (const Triple& t : plan.triples) tr.push_back({t.i, t.j, t.mass});
  nlohmann::ordered_json j = {{"triples", tr}, {"cost", plan.cost}, {"p", plan.p}};
  return j.dump() + "\n";
}

void save_plan(const std::string& path, const TransportPlan& plan) { spit(path, plan_to_json(plan)); }

}  // namespace otb
