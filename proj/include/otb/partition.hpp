#pragma once

#include <cstddef>
#include <vector>

#include "otb/constants.hpp"
#include "otb/measure.hpp"

namespace otb {

struct Cell {
  std::vector<std::size_t> members;  // point indices
  int parent = -1;                   // index into the previous level
  double diameter_bound = 0.0;
  std::vector<long long> key;        // dyadic coordinates (max norm only)
};

// Nested partitions of a finite point set in the unit ball, levels 0..depth.
struct PartitionTree {
  Norm norm = Norm::Max;
  double r = 2.0;
  int depth = 0;
  int dim = 1;
  double scale = 1.0;  // geometry multiplied by scale after construction
  std::vector<double> points;
  std::vector<std::vector<Cell>> levels;
  std::vector<std::vector<int>> cell_of;  // cell_of[level][point]

  std::size_t size() const { return points.size() / std::size_t(dim); }
  const double* point(std::size_t i) const { return points.data() + i * std::size_t(dim); }
  // Diameter bound of level-l cells: 2 r^{-l} times scale.
  double delta(int level) const;
  PartitionTree scaled(double alpha) const;
};

// Max norm requires r = 2 (dyadic cubes); Euclidean requires r > 2 (greedy nets
// at radius (r-2)/r * r^{-l}, nested bottom-up).
PartitionTree build_nested_partition(const std::vector<double>& points, int dim, Norm norm, int depth, double r);

// Tree over the union of both supports.
PartitionTree build_union_partition(const DiscreteMeasure& mu, const DiscreteMeasure& nu, Norm norm, int depth,
                                    double r);

// Largest pairwise distance among a cell's members.
double realized_diameter(const PartitionTree& tree, int level, std::size_t cell);

// Smallest k with r^{-kp} < 1e-3, capped at 40.
int default_depth(double r, double p);

double default_ratio(Norm norm);  // 2 for the max norm, 4 for the Euclidean norm

}  // namespace otb
