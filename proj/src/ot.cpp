#include "otb/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "otb/errors.hpp"
#include "otb/parallel.hpp"

namespace otb {

namespace {

// Continued-fraction search for num/den with den <= max_den and |x - num/den| <= tol.
bool as_fraction(double x, std::int64_t max_den, double tol, std::int64_t& num, std::int64_t& den) {
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(r);
    if (fl > 9e15) return false;
    std::int64_t ai = static_cast<std::int64_t>(fl);
    std::int64_t h2 = ai * h1 + h0, k2 = ai * k1 + k0;
    if (k2 > max_den) return false;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    if (std::abs(x - double(h1) / double(k1)) <= tol) {
      num = h1;
      den = k1;
      return true;
    }
    double frac = r - fl;
    if (frac <= 0.0) return false;
    r = 1.0 / frac;
  }
  return false;
}

bool exact_scaling(const std::vector<double>& a, const std::vector<double>& b, IntegerWeights& out) {
  const std::int64_t max_den = 1 << 20;
  const std::int64_t max_total = std::int64_t(1) << 50;
  std::vector<std::int64_t> nums, dens;
  std::int64_t L = 1;
  for (const auto* v : {&a, &b}) {
    for (double w : *v) {
      std::int64_t nu = 0, de = 1;
      if (!as_fraction(w, max_den, 1e-12, nu, de)) return false;
      std::int64_t g = std::gcd(L, de);
      if (L / g > max_total / de) return false;
      L = L / g * de;
      nums.push_back(nu);
      dens.push_back(de);
    }
  }
  out.total = L;
  out.a.resize(a.size());
  out.b.resize(b.size());
  std::int64_t sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sa += out.a[i] = nums[i] * (L / dens[i]);
  for (std::size_t j = 0; j < b.size(); ++j) {
    std::size_t k = a.size() + j;
    sb += out.b[j] = nums[k] * (L / dens[k]);
  }
  out.exact = true;
  return sa == L && sb == L;
}

std::vector<std::int64_t> round_to_total(const std::vector<double>& w, std::int64_t total) {
  double s = 0.0;
  for (double x : w) s += x;
  std::vector<std::int64_t> out(w.size());
  std::vector<std::pair<double, std::size_t>> rem(w.size());
  std::int64_t used = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    long double t = (long double)w[i] / s * total;
    long double f = std::floor(t);
    out[i] = static_cast<std::int64_t>(f);
    used += out[i];
    rem[i] = {double(t - f), i};
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
  for (std::size_t k = 0; used < total; k = (k + 1) % rem.size(), ++used) ++out[rem[k].second];
  return out;
}

// Primal network simplex on the bipartite graph with an artificial root,
// spanning tree kept as parent / thread / successor-count arrays.
class NetworkSimplex {
 public:
  NetworkSimplex(const std::vector<double>& cost, std::size_t m, std::size_t n, const std::vector<std::int64_t>& a,
                 const std::vector<std::int64_t>& b)
      : cost_(cost), m_(m), n_(n) {
    nodes_ = int(m + n);
    arcs_ = m * n;
    root_ = nodes_;
    const std::size_t all = arcs_ + std::size_t(nodes_);
    flow_.assign(all, 0);
    state_.assign(arcs_, kLower);
    art_src_.resize(nodes_);
    art_tgt_.resize(nodes_);
    art_cost_.resize(nodes_);
    const int tot = nodes_ + 1;
    parent_.resize(tot);
    pred_.resize(tot);
    thread_.resize(tot);
    rev_thread_.resize(tot);
    succ_num_.resize(tot);
    last_succ_.resize(tot);
    pred_dir_.resize(tot);
    pi_.resize(tot);

    double maxc = 0.0;
    for (double c : cost) maxc = std::max(maxc, c);
    art_ = (maxc + 1.0) * (nodes_ + 1);
    tol_ = 64.0 * std::numeric_limits<double>::epsilon() * art_;

    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = nodes_ + 1;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;
    for (int u = 0; u < nodes_; ++u) {
      std::size_t e = arcs_ + u;
      parent_[u] = root_;
      pred_[u] = std::int64_t(e);
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      std::int64_t s = u < int(m) ? a[u] : -b[u - m];
      if (s >= 0) {
        pred_dir_[u] = kUp;
        pi_[u] = 0.0;
        art_src_[u] = u;
        art_tgt_[u] = root_;
        flow_[e] = s;
        art_cost_[u] = 0.0;
      } else {
        pred_dir_[u] = kDown;
        pi_[u] = art_;
        art_src_[u] = root_;
        art_tgt_[u] = u;
        flow_[e] = -s;
        art_cost_[u] = art_;
      }
    }
    if (nodes_ > 0) thread_[nodes_ - 1] = root_;
    block_ = std::max<std::size_t>(10, std::size_t(std::ceil(std::sqrt(double(arcs_)))));
  }

  // Returns true on a certified optimum.
  bool run() {
    for (int round = 0; round < 8; ++round) {
      while (find_entering()) {
        find_join();
        if (!find_leaving()) throw Error("transport problem is unbounded");
        change_flow();
        update_tree();
        update_potential();
        ++pivots_;
      }
      recompute_potentials();
      if (!find_entering()) break;
    }
    for (std::size_t e = arcs_; e < flow_.size(); ++e)
      if (flow_[e] != 0) return false;
    for (std::size_t e = 0; e < arcs_; ++e)
      if (state_[e] == kLower && reduced(e) < -tol_) return false;
    return true;
  }

  std::int64_t flow(std::size_t e) const { return flow_[e]; }
  std::size_t pivots() const { return pivots_; }

 private:
  static constexpr signed char kLower = 1, kTree = 0;
  static constexpr int kUp = 1, kDown = -1;

  int src(std::size_t e) const { return e < arcs_ ? int(e / n_) : art_src_[e - arcs_]; }
  int tgt(std::size_t e) const { return e < arcs_ ? int(m_ + e % n_) : art_tgt_[e - arcs_]; }
  double arc_cost(std::size_t e) const { return e < arcs_ ? cost_[e] : art_cost_[e - arcs_]; }
  double reduced(std::size_t e) const { return cost_[e] + pi_[e / n_] - pi_[m_ + e % n_]; }

  bool find_entering() {
    double best = -tol_;
    bool found = false;
    std::size_t cnt = block_, e = next_arc_;
    for (std::size_t k = 0; k < arcs_; ++k, ++e) {
      if (e == arcs_) e = 0;
      if (state_[e] == kLower) {
        double c = reduced(e);
        if (c < best) {
          best = c;
          in_arc_ = e;
          found = true;
        }
      }
      if (--cnt == 0) {
        if (found) {
          next_arc_ = e + 1 == arcs_ ? 0 : e + 1;
          return true;
        }
        cnt = block_;
      }
    }
    next_arc_ = 0;
    return found;
  }

  void find_join() {
    int u = src(in_arc_), v = tgt(in_arc_);
    while (u != v) {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  bool find_leaving() {
    const std::int64_t inf = std::numeric_limits<std::int64_t>::max();
    int first = src(in_arc_), second = tgt(in_arc_);
    delta_ = inf;
    int result = 0;
    for (int u = first; u != join_; u = parent_[u]) {
      std::int64_t d = pred_dir_[u] == kUp ? flow_[pred_[u]] : inf;
      if (d < delta_) {
        delta_ = d;
        u_out_ = u;
        result = 1;
      }
    }
    for (int u = second; u != join_; u = parent_[u]) {
      std::int64_t d = pred_dir_[u] == kDown ? flow_[pred_[u]] : inf;
      if (d <= delta_) {
        delta_ = d;
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
    return delta_ < inf;
  }

  void change_flow() {
    if (delta_ > 0) {
      flow_[in_arc_] += delta_;
      for (int u = src(in_arc_); u != join_; u = parent_[u]) flow_[pred_[u]] -= pred_dir_[u] * delta_;
      for (int u = tgt(in_arc_); u != join_; u = parent_[u]) flow_[pred_[u]] += pred_dir_[u] * delta_;
    }
    state_[in_arc_] = kTree;
    std::size_t out = std::size_t(pred_[u_out_]);
    if (out < arcs_) state_[out] = kLower;
  }

  void update_tree() {
    int old_rev_thread = rev_thread_[u_out_];
    int old_succ_num = succ_num_[u_out_];
    int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = std::int64_t(in_arc_);
      pred_dir_[u_in_] = u_in_ == src(in_arc_) ? kUp : kDown;
      if (thread_[v_in_] != u_out_) {
        int after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      int thread_continue = old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];
      int stem = u_in_, par_stem = v_in_, next_stem;
      int last = last_succ_[u_in_];
      int before, after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_.clear();
      dirty_.push_back(v_in_);
      while (stem != u_out_) {
        next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_.push_back(last);
        before = rev_thread_[stem];
        thread_[before] = after;
        rev_thread_[after] = before;
        parent_[stem] = par_stem;
        par_stem = stem;
        stem = next_stem;
        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
        after = thread_[last];
      }
      parent_[u_out_] = par_stem;
      thread_[last] = thread_continue;
      rev_thread_[thread_continue] = last;
      last_succ_[u_out_] = last;
      if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }
      for (int u : dirty_) rev_thread_[thread_[u]] = u;

      int tmp_sc = 0, tmp_ls = last_succ_[u_out_];
      for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        pred_dir_[u] = -pred_dir_[p];
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = std::int64_t(in_arc_);
      pred_dir_[u_in_] = u_in_ == src(in_arc_) ? kUp : kDown;
      succ_num_[u_in_] = old_succ_num;
    }

    int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    int last_succ_out = last_succ_[u_out_];
    for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) last_succ_[u] = last_succ_out;
    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_out;
    }
    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * arc_cost(in_arc_);
    int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  // Potentials from scratch along the thread order (parents come first).
  void recompute_potentials() {
    pi_[root_] = 0.0;
    for (int u = thread_[root_]; u != root_; u = thread_[u]) {
      std::size_t e = std::size_t(pred_[u]);
      pi_[u] = pi_[parent_[u]] - pred_dir_[u] * arc_cost(e);
    }
  }

  const std::vector<double>& cost_;
  std::size_t m_, n_, arcs_;
  int nodes_, root_;
  double art_ = 0.0, tol_ = 0.0;
  std::vector<std::int64_t> flow_;
  std::vector<signed char> state_;
  std::vector<int> art_src_, art_tgt_;
  std::vector<double> art_cost_;
  std::vector<int> parent_, thread_, rev_thread_, succ_num_, last_succ_, pred_dir_;
  std::vector<std::int64_t> pred_;
  std::vector<double> pi_;
  std::vector<int> dirty_;
  std::size_t block_ = 10, next_arc_ = 0, in_arc_ = 0, pivots_ = 0;
  int join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  std::int64_t delta_ = 0;
};

}  // namespace

std::vector<double> cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, Norm norm) {
  if (mu.dim() != nu.dim()) throw ArgumentError("measures have different dimensions");
  const std::size_t m = mu.size(), n = nu.size();
  if (m * n > kMaxTransportArcs)
    throw CapacityError("transport problem " + std::to_string(m) + " x " + std::to_string(n) + " exceeds the cap");
  std::vector<double> c(m * n);
  const int d = mu.dim();
  auto row = [&](std::size_t i) {
    for (std::size_t j = 0; j < n; ++j) {
      double r = distance(mu.point(i), nu.point(j), d, norm);
      c[i * n + j] = p == 1.0 ? r : p == 2.0 ? r * r : std::pow(r, p);
    }
  };
  if (m * n >= 1'000'000)
    parallel_for(m, row);
  else
    for (std::size_t i = 0; i < m; ++i) row(i);
  return c;
}

IntegerWeights integer_weights(const std::vector<double>& a, const std::vector<double>& b) {
  IntegerWeights w;
  if (exact_scaling(a, b, w)) return w;
  w = IntegerWeights{};
  w.total = std::int64_t(1) << 42;
  w.a = round_to_total(a, w.total);
  w.b = round_to_total(b, w.total);
  return w;
}

OtResult solve_transport(const std::vector<double>& cost, std::size_t m, std::size_t n, const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (m * n > kMaxTransportArcs)
    throw CapacityError("transport problem " + std::to_string(m) + " x " + std::to_string(n) + " exceeds the cap");
  if (cost.size() != m * n || a.size() != m || b.size() != n) throw ArgumentError("transport problem size mismatch");
  IntegerWeights w = integer_weights(a, b);
  NetworkSimplex ns(cost, m, n, w.a, w.b);
  OtResult r;
  r.certified = ns.run();
  r.pivots = ns.pivots();
  const double inv = 1.0 / double(w.total);
  for (std::size_t e = 0; e < m * n; ++e) {
    std::int64_t f = ns.flow(e);
    if (f > 0) {
      double mass = double(f) * inv;
      r.plan.triples.push_back({e / n, e % n, mass});
      r.cost += mass * cost[e];
    }
  }
  r.plan.cost = r.cost;
  return r;
}

OtResult exact_transport_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, Norm norm) {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  std::vector<double> c = cost_matrix(mu, nu, p, norm);
  OtResult r = solve_transport(c, mu.size(), nu.size(), mu.weights(), nu.weights());
  r.plan.p = p;
  if (!r.certified) throw Error("network simplex failed to certify optimality");
  return r;
}

double exact_transport_cost_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  if (mu.dim() != 1 || nu.dim() != 1) throw ArgumentError("1-d fast path needs one-dimensional measures");
  if (p < 1.0) return exact_transport_cost(mu, nu, p, Norm::Max).cost;
  auto sorted = [](const DiscreteMeasure& m) {
    std::vector<std::pair<double, double>> v(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) v[i] = {m.point(i)[0], m.weight(i)};
    std::sort(v.begin(), v.end());
    return v;
  };
  auto x = sorted(mu), y = sorted(nu);
  std::size_t i = 0, j = 0;
  double ra = x[0].second, rb = y[0].second, cost = 0.0;
  while (i < x.size() && j < y.size()) {
    double mass = std::min(ra, rb);
    cost += mass * std::pow(std::abs(x[i].first - y[j].first), p);
    ra -= mass;
    rb -= mass;
    if (ra <= rb) {
      if (++i < x.size()) ra += x[i].second;
    } else {
      if (++j < y.size()) rb += y[j].second;
    }
  }
  return cost;
}

}  // namespace otb
