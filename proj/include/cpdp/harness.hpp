#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpdp/dataset.hpp"
#include "cpdp/eval.hpp"
#include "cpdp/fwtnb.hpp"
#include "cpdp/mic.hpp"

namespace cpdp {

enum class MethodKind {
  TomoFwtnb,     // TOMO over-sampling, feature-weighted classifier
  TomoTnb,       // TOMO over-sampling, plain TNB
  SmoteTnb,      // SMOTE(N) over-sampling, plain TNB
  FwtnbSmote100  // SMOTE(100) over-sampling, feature-weighted classifier
};

struct Method {
  MethodKind kind = MethodKind::TomoFwtnb;
  int smote_percent = 100;

  /// Accepts tomofwtnb, tomo+tnb, smote+tnb, smoteN+tnb, fwtnb+smote100, tnb+smote100.
  static Method parse(const std::string& name, int smote_percent = 100);
  std::string name() const;
  bool uses_tomo() const noexcept { return kind == MethodKind::TomoFwtnb || kind == MethodKind::TomoTnb; }
  bool feature_weighted() const noexcept {
    return kind == MethodKind::TomoFwtnb || kind == MethodKind::FwtnbSmote100;
  }
};

struct PairSpec {
  std::string source;
  std::string target;
  friend bool operator==(const PairSpec&, const PairSpec&) = default;
  friend auto operator<=>(const PairSpec&, const PairSpec&) = default;
};

struct ExperimentConfig {
  std::filesystem::path dataset_dir;
  std::optional<std::vector<PairSpec>> pairs;  // nullopt = derive from defective rates
  Method method;
  double ratio = 1.0;
  double lambda = 0.4;
  double sigma = 1.0;
  std::size_t repetitions = 30;
  double train_fraction = 0.9;
  std::uint64_t seed = 1;
  std::filesystem::path output = "results.csv";
  std::filesystem::path model_dir;  // optional: saves the first repetition's model per pair
  std::string bug_column = "bug";
  bool interpolate = false;
  bool normalized_similarity = false;
  std::size_t smote_k = 5;
  MineParams mine;

  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. CPDP_SEED in the
/// environment, when set, overrides `seed`.
ExperimentConfig parse_config(std::istream& in, bool apply_env = true);
ExperimentConfig load_config(const std::filesystem::path& path, bool apply_env = true);

/// Seven lowest-defect-rate datasets as sources, five highest as targets,
/// minus self pairs. Rate ties are broken by name.
std::vector<PairSpec> build_pairs(const std::vector<DatasetStats>& stats);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value
};

Summary summarize_values(std::span<const double> values);

struct PairResult {
  std::string source;
  std::string target;
  std::vector<EvalRecord> records;

  std::vector<double> metric(const std::string& name) const;
  Summary summary(const std::string& name) const { return summarize_values(metric(name)); }
};

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {"pd", "pf", "g_measure", "mcc"};
  return names;
}

/// Per-repetition seed from (master seed, pair names, repetition, redraw).
std::uint64_t derive_seed(std::uint64_t master, const std::string& source, const std::string& target,
                          std::size_t repetition, std::size_t redraw = 0);

/// One trained pipeline run on prepared (cleaned, log-transformed) data.
struct MethodOutcome {
  EvalRecord record;
  ConfusionMatrix confusion;
  FwtnbModel model;
  std::size_t synthetic_rows = 0;
};

MethodOutcome run_method(const DefectDataset& train, const DefectDataset& target, const ExperimentConfig& cfg,
                         std::uint64_t seed);

/// Repeated train-subsample runs for one source/target pair. Both datasets
/// must already be cleaned and log-transformed.
PairResult run_pair(const DefectDataset& source, const DefectDataset& target, const ExperimentConfig& cfg);

/// Cleans and log-transforms a raw dataset.
DefectDataset prepare(const DefectDataset& raw);

/// Loads the dataset directory, resolves pairs and runs every pair.
std::vector<PairResult> run_experiment(const ExperimentConfig& cfg);
/// Same, on already loaded raw datasets (dataset_dir is ignored).
std::vector<PairResult> run_experiment(const std::vector<DefectDataset>& raw, const ExperimentConfig& cfg);

void write_results_csv(std::ostream& out, const std::vector<PairResult>& results);
std::vector<PairResult> read_results_csv(std::istream& in);

/// Table of mean±std per pair plus an average row.
std::string render_summary(const std::vector<PairResult>& results, const std::string& title = "");

struct PairComparison {
  std::string source;
  std::string target;
  std::map<std::string, StatResult> per_metric;
};

struct Tally {
  std::size_t win = 0;
  std::size_t tie = 0;
  std::size_t lose = 0;
};

struct ComparisonReport {
  std::vector<PairComparison> pairs;
  std::map<std::string, Tally> totals;
};

ComparisonReport compare(const std::vector<PairResult>& a, const std::vector<PairResult>& b);
std::string render_comparison(const ComparisonReport& report);

enum class SweepParam { Lambda, Sigma };

struct SweepRow {
  double value = 0.0;
  Summary g_measure;
  Summary mcc;
};

/// One full-source run per pair for every value; aggregates across pairs.
std::vector<SweepRow> sweep(SweepParam param, std::span<const double> values, const ExperimentConfig& cfg);
std::vector<SweepRow> sweep(SweepParam param, std::span<const double> values, const std::vector<DefectDataset>& raw,
                            const ExperimentConfig& cfg);
void write_sweep_csv(std::ostream& out, SweepParam param, const std::vector<SweepRow>& rows);

}  // namespace cpdp
