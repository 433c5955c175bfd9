#include "otb/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <cstdint>
#include <unordered_map>

#include "otb/constants.hpp"
#include "otb/errors.hpp"

namespace otb {

namespace {

// Position of every atom of m among the tree points.
std::vector<std::size_t> locate(const DiscreteMeasure& m, const PartitionTree& t,
                                const std::map<std::vector<double>, std::size_t>& where) {
  std::vector<std::size_t> pos(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto it = where.find(std::vector<double>(m.point(i), m.point(i) + m.dim()));
    if (it == where.end()) throw SupportMismatchError("atom " + std::to_string(i) + " is not a point of the partition tree");
    pos[i] = it->second;
  }
  (void)t;
  return pos;
}

double ratio(double part, double whole) { return whole > 0.0 ? part / whole : 0.0; }

struct PlanBuilder {
  std::unordered_map<std::uint64_t, double> mass;
  std::size_t n = 0;
  void add(std::size_t i, std::size_t j, double m) {
    if (m > 0.0) mass[std::uint64_t(i) * n + j] += m;
  }
  std::vector<Triple> triples() const {
    std::vector<Triple> out;
    out.reserve(mass.size());
    for (const auto& [k, m] : mass) out.push_back({std::size_t(k / n), std::size_t(k % n), m});
    std::sort(out.begin(), out.end(), [](const Triple& a, const Triple& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    return out;
  }
};

}  // namespace

CouplingResult hierarchical_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PartitionTree& t,
                                     double p) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  if (mu.dim() != t.dim || nu.dim() != t.dim) throw SupportMismatchError("measure and tree dimensions differ");
  std::map<std::vector<double>, std::size_t> where;
  for (std::size_t i = 0; i < t.size(); ++i) where.emplace(std::vector<double>(t.point(i), t.point(i) + t.dim), i);
  const std::vector<std::size_t> mpos = locate(mu, t, where), npos = locate(nu, t, where);

  const int k = t.depth;
  // Atoms of each measure per cell, and cell masses.
  std::vector<std::vector<std::vector<std::size_t>>> mat(k + 1), nat(k + 1);
  std::vector<std::vector<double>> mm(k + 1), nm(k + 1);
  for (int l = 0; l <= k; ++l) {
    std::size_t nc = t.levels[l].size();
    mat[l].assign(nc, {});
    nat[l].assign(nc, {});
    mm[l].assign(nc, 0.0);
    nm[l].assign(nc, 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      int c = t.cell_of[l][mpos[i]];
      mat[l][c].push_back(i);
      mm[l][c] += mu.weight(i);
    }
    for (std::size_t j = 0; j < nu.size(); ++j) {
      int c = t.cell_of[l][npos[j]];
      nat[l][c].push_back(j);
      nm[l][c] += nu.weight(j);
    }
  }
  std::vector<std::vector<std::vector<int>>> children(k + 1);
  for (int l = 0; l < k; ++l) {
    children[l].assign(t.levels[l].size(), {});
    for (std::size_t c = 0; c < t.levels[l + 1].size(); ++c) children[l][t.levels[l + 1][c].parent].push_back(int(c));
  }

  CouplingResult res;
  res.u.assign(k, 0.0);
  res.u_bound.assign(k, 0.0);
  for (int l = 0; l <= k; ++l) res.delta.push_back(t.delta(l));

  PlanBuilder pb;
  pb.n = nu.size();
  std::vector<double> w(t.levels[0].size(), 0.0);
  for (std::size_t c = 0; c < w.size(); ++c) w[c] = std::min(mm[0][c], nm[0][c]);
  for (int l = 0; l <= k; ++l) {
    std::vector<double> wn;
    if (l < k) wn.assign(t.levels[l + 1].size(), 0.0);
    for (std::size_t f = 0; f < t.levels[l].size(); ++f) {
      const double muF = mm[l][f], nuF = nm[l][f];
      if (l == k) {
        if (w[f] <= 0.0) continue;
        for (std::size_t i : mat[l][f])
          for (std::size_t j : nat[l][f]) pb.add(i, j, w[f] * ratio(mu.weight(i), muF) * ratio(nu.weight(j), nuF));
        continue;
      }
      double q = 0.0, sabs = 0.0;
      for (int c : children[l][f]) {
        double a = ratio(mm[l + 1][c], muF), b = ratio(nm[l + 1][c], nuF);
        wn[c] = w[f] * std::min(a, b);
        q += std::max(a - b, 0.0);
        sabs += std::abs(a - b);
      }
      res.u_bound[l] += 0.5 * std::min(muF, nuF) * sabs;
      if (w[f] <= 0.0 || q <= 0.0) continue;
      res.u[l] += w[f] * q;
      // Residual product alpha_F x beta_F with mass w_F q_F.
      for (int c : children[l][f]) {
        double a = ratio(mm[l + 1][c], muF), b = ratio(nm[l + 1][c], nuF);
        if (a <= b) continue;
        for (int c2 : children[l][f]) {
          double a2 = ratio(mm[l + 1][c2], muF), b2 = ratio(nm[l + 1][c2], nuF);
          if (b2 <= a2) continue;
          double base = w[f] / q * (a - b) * (b2 - a2);
          for (std::size_t i : mat[l + 1][c])
            for (std::size_t j : nat[l + 1][c2])
              pb.add(i, j, base * ratio(mu.weight(i), mm[l + 1][c]) * ratio(nu.weight(j), nm[l + 1][c2]));
        }
      }
    }
    w.swap(wn);
  }

  res.plan.triples = pb.triples();
  res.plan.p = p;
  res.plan.cost = plan_cost(res.plan, mu, nu, p, t.norm);
  double cb = std::pow(res.delta[k], p);
  for (int l = 0; l < k; ++l) cb += std::pow(res.delta[l], p) * res.u[l];
  res.certified_bound = cb;
  return res;
}

int shell_index(double radius, double a) {
  if (radius < 1.0) return 0;
  int n = int(std::floor(std::log(radius) / std::log(a))) + 1;
  while (n > 0 && radius < std::pow(a, n - 1)) --n;
  while (!(radius < std::pow(a, n))) ++n;
  return n;
}

AnnulusResult annulus_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double a, double p, int depth,
                               Norm norm, double r) {
  if (!(a > 1.0)) throw DomainError("annulus ratio a must exceed 1");
  if (!(p > 0.0)) throw DomainError("p must be positive");
  if (mu.dim() != nu.dim()) throw ArgumentError("measures have different dimensions");
  if (r <= 0.0) r = default_ratio(norm);
  if (depth < 0) depth = default_depth(r, p);
  const int d = mu.dim();

  std::map<int, std::vector<std::size_t>> ms, ns;
  for (std::size_t i = 0; i < mu.size(); ++i) ms[shell_index(norm_of(mu.point(i), d, norm), a)].push_back(i);
  for (std::size_t j = 0; j < nu.size(); ++j) ns[shell_index(norm_of(nu.point(j), d, norm), a)].push_back(j);
  std::map<int, std::pair<double, double>> mass;
  for (auto& [s, v] : ms)
    for (std::size_t i : v) mass[s].first += mu.weight(i);
  for (auto& [s, v] : ns)
    for (std::size_t j : v) mass[s].second += nu.weight(j);

  AnnulusResult res;
  PlanBuilder pb;
  pb.n = nu.size();
  double q = 0.0;
  for (auto& [s, mv] : mass) {
    auto [mG, nG] = mv;
    AnnulusTerm term;
    term.shell = s;
    term.mu_mass = mG;
    term.nu_mass = nG;
    q += std::max(mG - nG, 0.0);
    const double both = std::min(mG, nG);
    const double scale = std::pow(a, -s);
    if (both > 0.0) {
      auto restrict = [&](const DiscreteMeasure& m, const std::vector<std::size_t>& idx, double total) {
        std::vector<double> c, w;
        for (std::size_t i : idx) {
          for (int k = 0; k < d; ++k) c.push_back(m.point(i)[k] * scale);
          w.push_back(m.weight(i) / total);
        }
        double sw = 0.0;
        for (double x : w) sw += x;
        for (double& x : w) x /= sw;
        return DiscreteMeasure(d, std::move(c), std::move(w));
      };
      DiscreteMeasure rm = restrict(mu, ms[s], mG), rn = restrict(nu, ns[s], nG);
      PartitionTree tree = build_union_partition(rm, rn, norm, depth, r);
      CouplingResult cr = hierarchical_coupling(rm, rn, tree, p);
      term.certified = cr.certified_bound;
      for (const Triple& tr : cr.plan.triples) pb.add(ms[s][tr.i], ns[s][tr.j], both * tr.mass);
    }
    res.certified_bound += std::pow(a, p * s) * (std::exp2(p) * eps_p(p) * std::abs(mG - nG) + both * term.certified);
    res.shells.push_back(term);
  }
  if (q > 0.0) {
    for (auto& [s, mv] : mass) {
      double ex = mv.first - mv.second;
      if (ex <= 0.0) continue;
      for (auto& [s2, mv2] : mass) {
        double ex2 = mv2.second - mv2.first;
        if (ex2 <= 0.0) continue;
        double base = ex * ex2 / q;
        for (std::size_t i : ms[s])
          for (std::size_t j : ns[s2]) pb.add(i, j, base * mu.weight(i) / mv.first * nu.weight(j) / mv2.second);
      }
    }
  }
  res.plan.triples = pb.triples();
  res.plan.p = p;
  res.plan.cost = plan_cost(res.plan, mu, nu, p, norm);
  return res;
}

}  // namespace otb
