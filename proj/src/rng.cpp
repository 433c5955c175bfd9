#include "otb/rng.hpp"

#include "otb/errors.hpp"

namespace otb {

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw ArgumentError("alias table needs at least one weight");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ArgumentError("alias table needs positive total weight");
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] / total * double(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    std::size_t s = small.back(), l = large.back();
    small.pop_back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::size_t i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (std::size_t i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasTable::sample(CounterRng& rng) const {
  std::uint64_t x = rng.next();
  std::size_t col = std::size_t((unsigned __int128)x * prob_.size() >> 64);
  double u = rng.uniform();
  return u < prob_[col] ? col : alias_[col];
}

}  // namespace otb
