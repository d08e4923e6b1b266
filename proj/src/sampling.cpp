#include "cpdp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpdp/simd/kernels.hpp"

namespace cpdp {
namespace {

constexpr int kMaxLloydIterations = 1000;

std::size_t argmax_distance(const Matrix& points, std::size_t from) {
  const auto d = simd::distances_to(points, points.row(from));
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

std::vector<double> mean_of(const Matrix& points, const std::vector<int>& assignment, int cluster) {
  std::vector<double> m(points.cols(), 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (assignment[i] != cluster) continue;
    const auto r = points.row(i);
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += r[j];
    ++count;
  }
  if (count == 0) throw Error(Error::Kind::Degenerate, "two_means: a cluster became empty");
  for (auto& v : m) v /= static_cast<double>(count);
  return m;
}

double norm(std::span<const double> v) { return std::sqrt(simd::dot(v, v)); }

std::vector<std::size_t> stable_order_by(const std::vector<double>& key) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  return idx;
}

class Synthesizer {
 public:
  Synthesizer(const Matrix& sorted, const std::vector<std::size_t>& original_index,
              const std::vector<std::vector<std::size_t>>& neighbors, bool interpolate, Rng& rng)
      : sorted_(sorted), original_(original_index), neighbors_(neighbors), interpolate_(interpolate), rng_(rng) {
    batch_.rows = Matrix(0, sorted.cols());
    batch_.interpolated = interpolate;
  }

  // Synthesizes from sorted row `i` and its `rank`-th neighbor (0-based).
  void emit(std::size_t i, std::size_t rank) {
    const std::size_t nb = neighbors_[i].at(rank);
    const double r = rng_.uniform_open();
    const auto base = sorted_.row(i);
    const auto other = sorted_.row(nb);
    std::vector<double> out(base.size());
    for (std::size_t j = 0; j < base.size(); ++j) {
      const double step = r * (other[j] - base[j]);
      out[j] = interpolate_ ? base[j] + step : base[j] - step;
    }
    batch_.rows.append_row(out);
    batch_.origin.push_back({original_[i], original_[nb], r});
  }

  SyntheticBatch take() { return std::move(batch_); }

 private:
  const Matrix& sorted_;
  const std::vector<std::size_t>& original_;
  const std::vector<std::vector<std::size_t>>& neighbors_;
  bool interpolate_;
  Rng& rng_;
  SyntheticBatch batch_;
};

}  // namespace

ClusterSplit two_means(const Matrix& points, std::uint64_t seed) {
  const std::size_t n = points.rows();
  if (n < 2) throw Error(Error::Kind::InsufficientData, "two_means: need at least 2 rows");

  Rng rng(seed);
  const std::size_t start = rng.below(n);
  const std::size_t a = argmax_distance(points, start);
  const std::size_t b = argmax_distance(points, a);
  if (simd::squared_l2(points.row(a), points.row(b)) == 0.0)
    throw Error(Error::Kind::Degenerate, "two_means: all rows identical, no meaningful split");

  std::vector<double> c0(points.row(a).begin(), points.row(a).end());
  std::vector<double> c1(points.row(b).begin(), points.row(b).end());
  std::vector<int> assignment(n, -1);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    const auto d0 = simd::distances_to(points, c0);
    const auto d1 = simd::distances_to(points, c1);
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = d0[i] <= d1[i] ? 0 : 1;
      if (c != assignment[i]) {
        assignment[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
    c0 = mean_of(points, assignment, 0);
    c1 = mean_of(points, assignment, 1);
  }

  const auto size1 = static_cast<std::size_t>(std::count(assignment.begin(), assignment.end(), 1));
  const std::size_t size0 = n - size1;
  int minority = 0;
  if (size1 < size0 || (size1 == size0 && norm(c1) < norm(c0))) minority = 1;

  ClusterSplit split;
  split.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) split.assignment[i] = assignment[i] == minority ? 1 : 0;
  split.minority_centroid = minority == 0 ? c0 : c1;
  split.minority_size = minority == 0 ? size0 : size1;
  return split;
}

std::vector<std::vector<std::size_t>> neighbor_order(const Matrix& sorted_minority, std::span<const double> centroid,
                                                     double lambda) {
  const std::size_t n = sorted_minority.rows();
  if (n < 2) throw Error(Error::Kind::InsufficientData, "neighbor_order: need at least 2 minority rows");
  if (centroid.size() != sorted_minority.cols())
    throw Error(Error::Kind::Dimension, "neighbor_order: centroid width mismatch");

  auto to_centroid = simd::distances_to(sorted_minority, centroid);
  const double centroid_sum = std::accumulate(to_centroid.begin(), to_centroid.end(), 0.0);
  for (auto& d : to_centroid) d = centroid_sum > 0.0 ? d / centroid_sum : 0.0;

  std::vector<std::vector<std::size_t>> order(n);
  std::vector<double> hybrid(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto to_row = simd::distances_to(sorted_minority, sorted_minority.row(i));
    to_row[i] = 0.0;
    const double row_sum = std::accumulate(to_row.begin(), to_row.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double ss = row_sum > 0.0 ? to_row[j] / row_sum : 0.0;
      hybrid[j] = lambda * ss + (1.0 - lambda) * to_centroid[j];
    }
    auto& row = order[i];
    row.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row.push_back(j);
    std::stable_sort(row.begin(), row.end(), [&](std::size_t a, std::size_t b) { return hybrid[a] < hybrid[b]; });
  }
  return order;
}

void TomoParams::validate() const {
  if (!(ratio > 0.0)) throw Error(Error::Kind::Config, "TOMO ratio must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(Error::Kind::Config, "TOMO lambda must lie in [0, 1]");
}

long long tomo_synthetic_count(std::size_t n_majority, std::size_t n_minority, double ratio) {
  return static_cast<long long>(std::floor(static_cast<double>(n_majority) * ratio)) -
         static_cast<long long>(n_minority);
}

TomoBranch tomo_branch(std::size_t n_minority, long long n_synthetic) {
  if (n_synthetic <= 0) return TomoBranch::None;
  const auto np = static_cast<long long>(n_minority);
  if (n_synthetic < np) return TomoBranch::FewerThanMinority;
  if (n_synthetic <= np * (np - 1)) return TomoBranch::WithinNeighbors;
  return TomoBranch::MultiplePasses;
}

SyntheticBatch tomo_minority(const Matrix& minority, std::size_t n_majority, const Matrix& target,
                             const TomoParams& params) {
  params.validate();
  const std::size_t np = minority.rows();
  if (np < 2) throw Error(Error::Kind::InsufficientData, "tomo: need at least 2 minority rows");
  if (n_majority == 0) throw Error(Error::Kind::InsufficientData, "tomo: source has no majority rows");
  if (target.cols() != minority.cols()) throw Error(Error::Kind::Dimension, "tomo: target width mismatch");

  const long long n0 = tomo_synthetic_count(n_majority, np, params.ratio);
  if (n0 <= 0) {
    SyntheticBatch empty;
    empty.rows = Matrix(0, minority.cols());
    empty.interpolated = params.interpolate;
    return empty;
  }

  std::uint64_t seed_state = params.seed;
  const std::uint64_t cluster_seed = Rng::splitmix64(seed_state);
  Rng rng(Rng::splitmix64(seed_state));

  const ClusterSplit split = two_means(target, cluster_seed);
  const auto order = stable_order_by(simd::distances_to(minority, split.minority_centroid));
  const Matrix sorted = minority.select_rows(order);
  const auto neighbors = neighbor_order(sorted, split.minority_centroid, params.lambda);

  Synthesizer synth(sorted, order, neighbors, params.interpolate, rng);
  const auto n_p = static_cast<long long>(np);
  const long long k = n0 / n_p;  // floor(n0 / nP)
  const long long remainder = n0 - k * n_p;

  switch (tomo_branch(np, n0)) {
    case TomoBranch::FewerThanMinority:
      for (long long i = 0; i < n0; ++i) synth.emit(i, 0);
      break;
    case TomoBranch::WithinNeighbors:
      for (long long i = 0; i < n_p; ++i)
        for (long long j = 0; j < k; ++j) synth.emit(i, j);
      for (long long i = 0; i < remainder; ++i) synth.emit(i, k);
      break;
    case TomoBranch::MultiplePasses: {
      const long long passes = k / (n_p - 1);
      const long long partial = k - passes * (n_p - 1);
      for (long long pass = 0; pass < passes; ++pass)
        for (long long i = 0; i < n_p; ++i)
          for (long long j = 0; j < n_p - 1; ++j) synth.emit(i, j);
      for (long long i = 0; i < n_p; ++i)
        for (long long j = 0; j < partial; ++j) synth.emit(i, j);
      for (long long i = 0; i < remainder; ++i) synth.emit(i, partial);
      break;
    }
    case TomoBranch::None: break;
  }
  return synth.take();
}

SyntheticBatch tomo(const DefectDataset& source, const Matrix& target, const TomoParams& params) {
  return tomo_minority(source.rows_with_label(1), source.count_label(0), target, params);
}

SyntheticBatch smote(const Matrix& minority, int percent, std::size_t k, std::uint64_t seed) {
  if (percent < 100 || percent % 100 != 0)
    throw Error(Error::Kind::Config, "smote: percent must be a positive multiple of 100");
  if (k < 1) throw Error(Error::Kind::Config, "smote: k must be at least 1");
  const std::size_t np = minority.rows();
  if (np <= k) throw Error(Error::Kind::InsufficientData, "smote: need more minority rows than neighbors");

  Rng rng(seed);
  SyntheticBatch batch;
  batch.rows = Matrix(0, minority.cols());
  batch.interpolated = true;
  const int per_row = percent / 100;
  std::vector<double> out(minority.cols());
  for (std::size_t i = 0; i < np; ++i) {
    auto d = simd::distances_to(minority, minority.row(i));
    d[i] = INFINITY;
    auto nearest = stable_order_by(d);
    nearest.resize(k);
    const auto base = minority.row(i);
    for (int t = 0; t < per_row; ++t) {
      const std::size_t nb = nearest[rng.below(k)];
      const double r = rng.uniform();
      const auto other = minority.row(nb);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = base[j] + r * (other[j] - base[j]);
      batch.rows.append_row(out);
      batch.origin.push_back({i, nb, r});
    }
  }
  return batch;
}

DefectDataset augment(const DefectDataset& source, const SyntheticBatch& batch) {
  if (batch.size() > 0 && batch.rows.cols() != source.rows.cols())
    throw Error(Error::Kind::Dimension, "augment: synthetic width mismatch");
  DefectDataset out = source;
  for (std::size_t i = 0; i < batch.rows.rows(); ++i) {
    out.rows.append_row(batch.rows.row(i));
    out.labels.push_back(1);
  }
  return out;
}

}  // namespace cpdp
