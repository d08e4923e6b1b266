#include "cpdp/fwtnb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "cpdp/simd/kernels.hpp"

namespace cpdp {

TargetRanges TargetRanges::unbounded(std::size_t k) {
  return {std::vector<double>(k, -std::numeric_limits<double>::infinity()),
          std::vector<double>(k, std::numeric_limits<double>::infinity())};
}

TargetRanges target_ranges(const Matrix& target) {
  if (target.empty()) throw Error(Error::Kind::EmptyInput, "target_ranges: empty target data");
  TargetRanges r;
  r.min.assign(target.row(0).begin(), target.row(0).end());
  r.max = r.min;
  for (std::size_t i = 1; i < target.rows(); ++i) {
    const auto row = target.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      r.min[j] = std::min(r.min[j], row[j]);
      r.max[j] = std::max(r.max[j], row[j]);
    }
  }
  return r;
}

std::vector<double> similarity(const Matrix& source, const TargetRanges& ranges, const MicProfile& mic) {
  const std::size_t k = source.cols();
  if (ranges.size() != k || mic.size() != k) throw Error(Error::Kind::Dimension, "similarity: feature count mismatch");
  std::vector<double> s(source.rows(), 0.0);
  std::vector<double> inside(k);
  for (std::size_t i = 0; i < source.rows(); ++i) {
    const auto row = source.row(i);
    for (std::size_t j = 0; j < k; ++j) inside[j] = (ranges.min[j] <= row[j] && row[j] <= ranges.max[j]) ? 1.0 : 0.0;
    s[i] = simd::dot(inside, mic.mic);
  }
  return s;
}

std::vector<double> gravitation_weights(std::span<const double> scores, double mic_sum) {
  std::vector<double> w(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double gap = mic_sum - scores[i] + 1.0;
    w[i] = scores[i] / (gap * gap);
  }
  return w;
}

std::vector<double> normalized_gravitation_weights(std::span<const double> scores, double mic_sum) {
  std::vector<double> w(scores.size(), 0.0);
  if (mic_sum <= 0.0) return w;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = scores[i] / mic_sum;
    w[i] = s / ((2.0 - s) * (2.0 - s));
  }
  return w;
}

FwtnbModel fit(const BinMatrix& source, const Labels& labels, std::span<const double> weights, const MicProfile& mic,
               double sigma, const DiscretizationModel& discretizer) {
  const std::size_t n = source.rows;
  const std::size_t k = source.cols;
  if (labels.size() != n || weights.size() != n) throw Error(Error::Kind::Dimension, "fit: row count mismatch");
  if (mic.size() != k || discretizer.num_features() != k)
    throw Error(Error::Kind::Dimension, "fit: feature count mismatch");
  if (!(sigma > 0.0)) throw Error(Error::Kind::Config, "fit: sigma must be positive");

  std::array<double, 2> class_weight{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error(Error::Kind::Domain, "fit: labels must be 0/1");
    if (!(weights[i] >= 0.0)) throw Error(Error::Kind::Domain, "fit: weights must be non-negative");
    class_weight[labels[i]] += weights[i];
  }
  const double total_weight = class_weight[0] + class_weight[1];

  FwtnbModel m;
  for (int c = 0; c < 2; ++c) m.priors_[c] = (class_weight[c] + 1.0) / (total_weight + 2.0);

  m.conditionals_.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t bins = discretizer.bin_count(j);
    std::array<std::vector<double>, 2> counts{std::vector<double>(bins, 0.0), std::vector<double>(bins, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
      const int v = source(i, j);
      if (v < 0 || static_cast<std::size_t>(v) >= bins) throw Error(Error::Kind::Domain, "fit: bin index out of range");
      counts[labels[i]][v] += weights[i];
    }
    for (int c = 0; c < 2; ++c)
      for (auto& cnt : counts[c]) cnt = (cnt + 1.0) / (class_weight[c] + static_cast<double>(bins));
    m.conditionals_[j] = std::move(counts);
  }
  m.mic_ = mic;
  m.sigma_ = sigma;
  m.discretizer_ = discretizer;
  m.cache_logs();
  return m;
}

void FwtnbModel::cache_logs() {
  log_priors_ = {std::log(priors_[0]), std::log(priors_[1])};
  log_conditionals_ = conditionals_;
  for (auto& feature : log_conditionals_)
    for (auto& dist : feature)
      for (auto& p : dist) p = std::log(p);
}

std::vector<double> FwtnbModel::exponents() const {
  std::vector<double> e(num_features(), 1.0);
  if (mic_.mic_sum <= 0.0) return e;
  const double scale = sigma_ * sigma_ * mic_.mic_sum;
  for (std::size_t j = 0; j < e.size(); ++j) e[j] = std::exp(mic_.mic[j] / scale);
  return e;
}

Prediction FwtnbModel::score(std::span<const int> bins, std::span<const double> exponents) const {
  const std::size_t k = num_features();
  if (bins.size() != k) throw Error(Error::Kind::Dimension, "predict: row width does not match the model");
  std::array<double, 2> s{};
  std::vector<double> logp(k);
  for (int c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto& dist = log_conditionals_[j][c];
      const int v = bins[j];
      if (v < 0 || static_cast<std::size_t>(v) >= dist.size())
        throw Error(Error::Kind::Domain, "predict: bin index out of range for feature " + std::to_string(j));
      logp[j] = dist[v];
    }
    s[c] = log_priors_[c] + simd::dot(exponents, logp);
  }
  Prediction p;
  const double top = std::max(s[0], s[1]);
  const double e0 = std::exp(s[0] - top);
  const double e1 = std::exp(s[1] - top);
  p.posterior = {e0 / (e0 + e1), e1 / (e0 + e1)};
  p.label = s[1] > s[0] ? 1 : 0;
  return p;
}

Prediction FwtnbModel::predict(std::span<const int> bins) const { return score(bins, exponents()); }

Prediction FwtnbModel::tnb_predict(std::span<const int> bins) const {
  const std::vector<double> ones(num_features(), 1.0);
  return score(bins, ones);
}

std::vector<int> FwtnbModel::predict_all(const BinMatrix& data, bool feature_weighted) const {
  const std::vector<double> e = feature_weighted ? exponents() : std::vector<double>(num_features(), 1.0);
  std::vector<int> out(data.rows);
  for (std::size_t r = 0; r < data.rows; ++r) out[r] = score(data.row(r), e).label;
  return out;
}

nlohmann::json FwtnbModel::to_json() const {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& feature : conditionals_) conds.push_back({feature[0], feature[1]});
  return {
      {"format", "cpdp-fwtnb"},
      {"version", kFormatVersion},
      {"priors", priors_},
      {"conditionals", conds},
      {"cuts", discretizer_.cuts},
      {"mic", mic_.mic},
      {"sigma", sigma_},
  };
}

FwtnbModel FwtnbModel::from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "cpdp-fwtnb")
      throw Error(Error::Kind::Format, "model: unexpected document format");
    if (doc.at("version").get<int>() != kFormatVersion)
      throw Error(Error::Kind::Format, "model: unsupported version " + doc.at("version").dump());
    FwtnbModel m;
    m.priors_ = doc.at("priors").get<std::array<double, 2>>();
    for (const auto& feature : doc.at("conditionals"))
      m.conditionals_.push_back({feature.at(0).get<std::vector<double>>(), feature.at(1).get<std::vector<double>>()});
    m.discretizer_.cuts = doc.at("cuts").get<std::vector<std::vector<double>>>();
    m.mic_ = MicProfile::from_values(doc.at("mic").get<std::vector<double>>());
    m.sigma_ = doc.at("sigma").get<double>();
    m.check_invariants();
    m.cache_logs();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Error::Kind::Format, std::string("model: malformed document: ") + e.what());
  }
}

void FwtnbModel::check_invariants() const {
  const std::size_t k = conditionals_.size();
  if (mic_.size() != k || discretizer_.num_features() != k)
    throw Error(Error::Kind::Format, "model: feature counts disagree");
  if (std::abs(priors_[0] + priors_[1] - 1.0) > 1e-9) throw Error(Error::Kind::Format, "model: priors do not sum to 1");
  for (std::size_t j = 0; j < k; ++j) {
    for (const auto& dist : conditionals_[j]) {
      if (dist.size() != discretizer_.bin_count(j)) throw Error(Error::Kind::Format, "model: bin count mismatch");
      if (std::abs(std::accumulate(dist.begin(), dist.end(), 0.0) - 1.0) > 1e-9)
        throw Error(Error::Kind::Format, "model: conditional does not sum to 1");
    }
  }
  if (!(sigma_ > 0.0)) throw Error(Error::Kind::Format, "model: sigma must be positive");
}

}  // namespace cpdp
