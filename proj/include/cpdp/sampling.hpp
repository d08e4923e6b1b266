#pragma once

#include <cstdint>
#include <vector>

#include "cpdp/common.hpp"
#include "cpdp/dataset.hpp"

namespace cpdp {

/// Two-cluster split of the target data. The smaller cluster is treated as
/// the target's potential defective modules.
struct ClusterSplit {
  std::vector<int> assignment;  // 1 = member of the smaller cluster
  std::vector<double> minority_centroid;
  std::size_t minority_size = 0;
};

/// Lloyd's 2-means seeded by a farthest pair: a random start row, the row
/// farthest from it, then the row farthest from that. Iterates until the
/// assignment stops changing. Equal-size clusters: the one whose centroid
/// has the smaller L2 norm is the minority.
ClusterSplit two_means(const Matrix& points, std::uint64_t seed);

/// Neighbor ranking of each minority row (rows already sorted by distance
/// to the target centroid). Row i lists the other n-1 indices, closest
/// first under lambda * rowNorm(dist to row) + (1 - lambda) * rowNorm(dist
/// of the neighbor to the centroid).
std::vector<std::vector<std::size_t>> neighbor_order(const Matrix& sorted_minority,
                                                     std::span<const double> centroid, double lambda);

struct TomoParams {
  double ratio = 1.0;
  double lambda = 0.4;
  std::uint64_t seed = 0;
  // false: base - r * (neighbor - base), pushing away from the neighbor.
  // true: conventional interpolation base + r * (neighbor - base).
  bool interpolate = false;

  void validate() const;
};

struct SyntheticOrigin {
  std::size_t base = 0;      // row index into the minority matrix as passed in
  std::size_t neighbor = 0;  // likewise
  double r = 0.0;
};

struct SyntheticBatch {
  Matrix rows;
  std::vector<SyntheticOrigin> origin;
  bool interpolated = false;

  std::size_t size() const noexcept { return origin.size(); }
};

enum class TomoBranch { None, FewerThanMinority, WithinNeighbors, MultiplePasses };

/// Which of the three generation schemes applies for n0 synthetic rows.
TomoBranch tomo_branch(std::size_t n_minority, long long n_synthetic);

/// floor(n_majority * ratio) - n_minority; may be negative.
long long tomo_synthetic_count(std::size_t n_majority, std::size_t n_minority, double ratio);

/// Transfer-oriented minority over-sampling. `source` supplies both classes
/// (label 1 = minority); `target` supplies only feature rows.
SyntheticBatch tomo(const DefectDataset& source, const Matrix& target, const TomoParams& params);

/// Core of tomo() on an already separated minority matrix.
SyntheticBatch tomo_minority(const Matrix& minority, std::size_t n_majority, const Matrix& target,
                             const TomoParams& params);

/// Classic SMOTE: percent/100 synthetic rows per minority row, each placed
/// between its base and one of its k nearest minority neighbors.
SyntheticBatch smote(const Matrix& minority, int percent, std::size_t k, std::uint64_t seed);

/// Source rows plus synthetic rows labeled 1.
DefectDataset augment(const DefectDataset& source, const SyntheticBatch& batch);

}  // namespace cpdp
