#include "otb/partition.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "otb/errors.hpp"

namespace otb {

namespace {

void max_norm_levels(PartitionTree& t) {
  const std::size_t n = t.size();
  for (int l = 0; l <= t.depth; ++l) {
    const double inv_side = std::ldexp(1.0, l - 1);  // 1 / 2^{1-l}
    std::map<std::vector<long long>, int> index;
    auto& cells = t.levels[l];
    auto& owner = t.cell_of[l];
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<long long> key(t.dim);
      for (int k = 0; k < t.dim; ++k) key[k] = static_cast<long long>(std::floor((t.point(i)[k] + 1.0) * inv_side));
      auto [it, fresh] = index.emplace(key, int(cells.size()));
      if (fresh) {
        Cell c;
        c.key = key;
        c.parent = l == 0 ? -1 : t.cell_of[l - 1][i];
        c.diameter_bound = t.delta(l);
        cells.push_back(std::move(c));
      }
      cells[it->second].members.push_back(i);
      owner[i] = it->second;
    }
  }
}

// Greedy farthest-point net; returns the center rank covering each point.
std::vector<int> greedy_net(const PartitionTree& t, double radius) {
  const std::size_t n = t.size();
  std::vector<std::size_t> centers;
  std::vector<double> near(n, std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  for (;;) {
    centers.push_back(next);
    for (std::size_t i = 0; i < n; ++i)
      near[i] = std::min(near[i], distance(t.point(i), t.point(next), t.dim, Norm::Euclidean));
    double far = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (near[i] > far) {
        far = near[i];
        next = i;
      }
    if (!(far > radius)) break;
  }
  std::vector<int> rank(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (distance(t.point(i), t.point(centers[c]), t.dim, Norm::Euclidean) <= radius) {
        rank[i] = int(c);
        break;
      }
    }
  }
  return rank;
}

void euclidean_levels(PartitionTree& t) {
  const std::size_t n = t.size();
  const double gamma = (t.r - 2.0) / t.r;
  // Resolved labels from the bottom level up; label[l][i] orders cells at level l.
  std::vector<std::vector<int>> label(t.depth + 1, std::vector<int>(n, 0));
  if (t.depth >= 1) label[t.depth] = greedy_net(t, gamma * std::pow(t.r, -t.depth));
  for (int l = t.depth - 1; l >= 1; --l) {
    std::vector<int> raw = greedy_net(t, gamma * std::pow(t.r, -l));
    std::map<int, int> target;  // child label -> first intersecting raw cell
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, fresh] = target.emplace(label[l + 1][i], raw[i]);
      if (!fresh) it->second = std::min(it->second, raw[i]);
    }
    for (std::size_t i = 0; i < n; ++i) label[l][i] = target[label[l + 1][i]];
  }
  for (int l = 0; l <= t.depth; ++l) {
    std::map<int, int> index;
    auto& cells = t.levels[l];
    for (std::size_t i = 0; i < n; ++i) {
      auto [it, fresh] = index.emplace(label[l][i], int(cells.size()));
      if (fresh) {
        Cell c;
        c.parent = l == 0 ? -1 : t.cell_of[l - 1][i];
        c.diameter_bound = t.delta(l);
        cells.push_back(std::move(c));
      }
      cells[it->second].members.push_back(i);
      t.cell_of[l][i] = it->second;
    }
  }
}

}  // namespace

double PartitionTree::delta(int level) const { return 2.0 * std::pow(r, -level) * scale; }

PartitionTree PartitionTree::scaled(double alpha) const {
  PartitionTree t = *this;
  for (double& c : t.points) c *= alpha;
  t.scale *= alpha;
  for (auto& lv : t.levels)
    for (auto& c : lv) c.diameter_bound *= alpha;
  return t;
}

PartitionTree build_nested_partition(const std::vector<double>& points, int dim, Norm norm, int depth, double r) {
  if (dim < 1) throw ArgumentError("dimension must be at least 1");
  if (points.empty() || points.size() % std::size_t(dim) != 0) throw ArgumentError("bad point array");
  if (depth < 0 || depth > 60) throw ArgumentError("depth must be in 0..60");
  if (norm == Norm::Max && r != 2.0) throw ArgumentError("max-norm partitions use r = 2");
  if (norm == Norm::Euclidean && !(r > 2.0)) throw ArgumentError("Euclidean partitions need r > 2");
  PartitionTree t;
  t.norm = norm;
  t.r = r;
  t.depth = depth;
  t.dim = dim;
  t.points = points;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!(norm_of(t.point(i), dim, norm) < 1.0))
      throw ContainmentError("point " + std::to_string(i) + " is not inside the open unit ball");
  t.levels.resize(depth + 1);
  t.cell_of.assign(depth + 1, std::vector<int>(t.size(), -1));
  if (norm == Norm::Max)
    max_norm_levels(t);
  else
    euclidean_levels(t);
  return t;
}

PartitionTree build_union_partition(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Norm norm, int depth,
                                    double r) {
  if (mu.dim() != nu.dim()) throw ArgumentError("measures have different dimensions");
  std::map<std::vector<double>, int> seen;
  std::vector<double> pts;
  for (const DiscreteMeasure* m : {&mu, &nu}) {
    for (std::size_t i = 0; i < m->size(); ++i) {
      std::vector<double> key(m->point(i), m->point(i) + m->dim());
      if (seen.emplace(key, 0).second) pts.insert(pts.end(), key.begin(), key.end());
    }
  }
  return build_nested_partition(pts, mu.dim(), norm, depth, r);
}

double realized_diameter(const PartitionTree& t, int level, std::size_t cell) {
  const auto& mem = t.levels[level][cell].members;
  double d = 0.0;
  for (std::size_t a = 0; a < mem.size(); ++a)
    for (std::size_t b = a + 1; b < mem.size(); ++b) d = std::max(d, distance(t.point(mem[a]), t.point(mem[b]), t.dim, t.norm));
  return d;
}

int default_depth(double r, double p) {
  int k = 0;
  while (k < 40 && !(std::pow(r, -k * p) < 1e-3)) ++k;
  return k;
}

double default_ratio(Norm norm) { return norm == Norm::Max ? 2.0 : 4.0; }

}  // namespace otb
