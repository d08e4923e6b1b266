#pragma once

#include <span>
#include <vector>

#include "cpdp/dataset.hpp"

namespace cpdp {

/// Grid-search parameters of the maximal information coefficient estimator.
/// The grid bound is B(n) = max(n^alpha, 4); `clumps` caps the number of
/// x-axis superclumps at clumps * (largest column count for the current
/// row count).
struct MineParams {
  double alpha = 0.6;
  double clumps = 15.0;

  void validate() const;
};

/// MIC of every feature against the class label.
struct MicProfile {
  std::vector<double> mic;
  double mic_sum = 0.0;

  static MicProfile from_values(std::vector<double> values);
  /// Every feature scored 1; turns the feature-weighted model into plain TNB.
  static MicProfile uniform(std::size_t k);

  std::size_t size() const noexcept { return mic.size(); }
};

/// Maximal information coefficient of (x, y), symmetrized over both axis
/// orientations. Constant inputs score 0.
double mic_score(std::span<const double> x, std::span<const double> y, const MineParams& params = {});

MicProfile mic_profile(const Matrix& features, const Labels& labels, const MineParams& params = {});
MicProfile mic_profile(const DefectDataset& ds, const MineParams& params = {});

}  // namespace cpdp
