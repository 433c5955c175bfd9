#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace otb {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based stream: draw c of stream (seed, replica) depends only on
// (seed, replica, c).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t replica)
      : key_(splitmix64(seed ^ splitmix64(replica ^ 0x6a09e667f3bcc909ULL))) {}

  std::uint64_t next() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Walker/Vose alias table for categorical sampling.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);
  std::size_t sample(CounterRng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace otb
