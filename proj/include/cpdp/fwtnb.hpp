#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cpdp/discretize.hpp"
#include "cpdp/mic.hpp"

namespace cpdp {

/// Per-feature [min, max] of the target data.
struct TargetRanges {
  std::vector<double> min;
  std::vector<double> max;

  std::size_t size() const noexcept { return min.size(); }
  /// Every range widened to (-inf, +inf).
  static TargetRanges unbounded(std::size_t k);
};

TargetRanges target_ranges(const Matrix& target);

/// m_i = sum_j [min_j <= a_ij <= max_j] * MIC_j (not divided by the MIC sum).
std::vector<double> similarity(const Matrix& source, const TargetRanges& ranges, const MicProfile& mic);

/// Data-gravitation weight w_i = s_i / (mic_sum - s_i + 1)^2.
std::vector<double> gravitation_weights(std::span<const double> scores, double mic_sum);

/// Weights when the similarity is first normalized to s_i / mic_sum in
/// [0, 1]: w_i = s_i / (2 - s_i)^2. Zero MIC sum gives all-zero weights.
std::vector<double> normalized_gravitation_weights(std::span<const double> scores, double mic_sum);

struct Prediction {
  int label = 0;
  std::array<double, 2> posterior{};
};

/// Weighted, Laplace-smoothed naive Bayes over discretized features, with
/// optional per-feature exponents derived from MIC relevance.
class FwtnbModel {
 public:
  static constexpr int kFormatVersion = 1;

  FwtnbModel() = default;

  std::size_t num_features() const noexcept { return conditionals_.size(); }
  double prior(int c) const { return priors_.at(c); }
  /// P(feature j falls in bin v | class c).
  double conditional(std::size_t j, std::size_t v, int c) const { return conditionals_.at(j).at(c).at(v); }
  std::size_t bin_count(std::size_t j) const { return conditionals_.at(j)[0].size(); }
  const MicProfile& mic() const noexcept { return mic_; }
  double sigma() const noexcept { return sigma_; }
  const DiscretizationModel& discretizer() const noexcept { return discretizer_; }

  /// exp(MIC_j / (sigma^2 * mic_sum)); all 1 when mic_sum is 0.
  std::vector<double> exponents() const;

  /// Label by the MIC-exponentiated posterior. Ties go to class 0.
  Prediction predict(std::span<const int> bins) const;
  /// Same rule with every exponent fixed at 1.
  Prediction tnb_predict(std::span<const int> bins) const;

  std::vector<int> predict_all(const BinMatrix& data, bool feature_weighted = true) const;

  nlohmann::json to_json() const;
  static FwtnbModel from_json(const nlohmann::json& doc);

  friend FwtnbModel fit(const BinMatrix& source, const Labels& labels, std::span<const double> weights,
                        const MicProfile& mic, double sigma, const DiscretizationModel& discretizer);

 private:
  Prediction score(std::span<const int> bins, std::span<const double> exponents) const;
  void check_invariants() const;

  std::array<double, 2> priors_{};
  // conditionals_[j][c][v]
  std::vector<std::array<std::vector<double>, 2>> conditionals_;
  std::vector<double> log_priors_;
  std::vector<std::array<std::vector<double>, 2>> log_conditionals_;
  MicProfile mic_;
  double sigma_ = 1.0;
  DiscretizationModel discretizer_;

  void cache_logs();
};

FwtnbModel fit(const BinMatrix& source, const Labels& labels, std::span<const double> weights, const MicProfile& mic,
               double sigma, const DiscretizationModel& discretizer);

}  // namespace cpdp
