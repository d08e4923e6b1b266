#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpdp/common.hpp"

namespace cpdp {

/// Labeled defect data: one row per module, label 1 = defective.
struct DefectDataset {
  std::string name;
  std::vector<std::string> feature_names;
  Matrix rows;
  Labels labels;

  // Provenance.
  std::string source_path;
  std::vector<std::string> skipped_columns;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_features() const noexcept { return feature_names.size(); }

  std::size_t count_label(int label) const;
  /// Rows carrying the given label, in dataset order.
  Matrix rows_with_label(int label) const;
};

struct DatasetStats {
  std::string name;
  std::size_t n_metrics = 0;
  std::size_t n_instances = 0;
  std::size_t n_defective = 0;
  double defective_rate = 0.0;
};

struct LoadOptions {
  std::string bug_column = "bug";
};

/// Parses a PROMISE-style CSV. Leading identifier columns (class name,
/// version, ...) are skipped and recorded; the defect-count column is
/// binarized (count > 0 -> 1). Empty cells and `?`/`NA`/`NaN` load as NaN
/// and are left for clean() to drop.
DefectDataset load_promise_csv(const std::filesystem::path& path, const LoadOptions& opts = {});
DefectDataset parse_promise_csv(std::istream& in, const std::string& name,
                                const LoadOptions& opts = {});

/// Drops rows with non-finite cells, then exact duplicates (same features
/// and label), keeping the first occurrence.
DefectDataset clean(const DefectDataset& ds);

/// v -> ln(v + 1) for every cell.
DefectDataset log_transform(const DefectDataset& ds);

DatasetStats summarize(const DefectDataset& ds);

/// Loads every *.csv in a directory (sorted by file name).
std::vector<DefectDataset> load_directory(const std::filesystem::path& dir,
                                          const LoadOptions& opts = {});

}  // namespace cpdp
