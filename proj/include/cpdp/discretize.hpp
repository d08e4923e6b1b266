#pragma once

#include <span>
#include <vector>

#include "cpdp/dataset.hpp"

namespace cpdp {

/// Per-feature ascending cut points. Feature j has cuts[j].size() + 1 bins.
struct DiscretizationModel {
  std::vector<std::vector<double>> cuts;

  std::size_t num_features() const noexcept { return cuts.size(); }
  std::size_t bin_count(std::size_t j) const { return cuts.at(j).size() + 1; }
  /// Index of the bin holding `v`: the number of cuts strictly below it.
  std::size_t bin_of(std::size_t j, double v) const;
};

/// Row-major matrix of bin indices.
struct BinMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> bins;

  int operator()(std::size_t r, std::size_t c) const { return bins[r * cols + c]; }
  std::span<const int> row(std::size_t r) const { return {bins.data() + r * cols, cols}; }
};

/// Fayyad-Irani recursive entropy discretization with the MDL stopping rule.
std::vector<double> fit_mdlp(std::span<const double> values, std::span<const int> labels);

DiscretizationModel fit_all(const Matrix& features, const Labels& labels);
DiscretizationModel fit_all(const DefectDataset& ds);

BinMatrix apply(const DiscretizationModel& model, const Matrix& features);

}  // namespace cpdp
