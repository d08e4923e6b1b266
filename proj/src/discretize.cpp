#include "cpdp/discretize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace cpdp {
namespace {

using Counts = std::array<double, 2>;

double entropy(const Counts& c) {
  const double total = c[0] + c[1];
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double k : c) {
    if (k > 0.0) {
      const double p = k / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

int classes_present(const Counts& c) { return (c[0] > 0.0 ? 1 : 0) + (c[1] > 0.0 ? 1 : 0); }

/// One run of equal values in sorted order.
struct ValueGroup {
  double value;
  Counts counts;
};

class MdlpSplitter {
 public:
  explicit MdlpSplitter(std::vector<ValueGroup> groups) : groups_(std::move(groups)) {}

  std::vector<double> run() {
    split(0, groups_.size());
    std::sort(cuts_.begin(), cuts_.end());
    return cuts_;
  }

 private:
  // Groups [lo, hi) form the current node.
  void split(std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return;
    Counts total{0.0, 0.0};
    for (std::size_t g = lo; g < hi; ++g) {
      total[0] += groups_[g].counts[0];
      total[1] += groups_[g].counts[1];
    }
    const double n = total[0] + total[1];
    const double node_entropy = entropy(total);
    if (node_entropy == 0.0) return;

    Counts left{0.0, 0.0};
    double best_weighted = INFINITY;
    std::size_t best = hi;
    Counts best_left{}, best_right{};
    for (std::size_t g = lo; g + 1 < hi; ++g) {
      left[0] += groups_[g].counts[0];
      left[1] += groups_[g].counts[1];
      if (!is_boundary(groups_[g], groups_[g + 1])) continue;
      const Counts right{total[0] - left[0], total[1] - left[1]};
      const double nl = left[0] + left[1];
      const double weighted = (nl / n) * entropy(left) + ((n - nl) / n) * entropy(right);
      if (weighted < best_weighted) {
        best_weighted = weighted;
        best = g;
        best_left = left;
        best_right = right;
      }
    }
    if (best == hi) return;

    const double gain = node_entropy - best_weighted;
    const int k = classes_present(total);
    const int k1 = classes_present(best_left);
    const int k2 = classes_present(best_right);
    const double delta = std::log2(std::pow(3.0, k) - 2.0) -
                         (k * node_entropy - k1 * entropy(best_left) - k2 * entropy(best_right));
    const double threshold = (std::log2(n - 1.0) + delta) / n;
    if (!(gain > threshold)) return;

    cuts_.push_back(0.5 * (groups_[best].value + groups_[best + 1].value));
    split(lo, best + 1);
    split(best + 1, hi);
  }

  // A cut between two value groups can only be optimal if the groups are not
  // both pure in the same class.
  static bool is_boundary(const ValueGroup& a, const ValueGroup& b) {
    const bool a_pure = classes_present(a.counts) == 1;
    const bool b_pure = classes_present(b.counts) == 1;
    if (!a_pure || !b_pure) return true;
    return (a.counts[1] > 0.0) != (b.counts[1] > 0.0);
  }

  std::vector<ValueGroup> groups_;
  std::vector<double> cuts_;
};

}  // namespace

std::size_t DiscretizationModel::bin_of(std::size_t j, double v) const {
  const auto& c = cuts.at(j);
  return static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), v) - c.begin());
}

std::vector<double> fit_mdlp(std::span<const double> values, std::span<const int> labels) {
  if (values.size() != labels.size()) throw Error(Error::Kind::Dimension, "fit_mdlp: length mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<ValueGroup> groups;
  for (std::size_t idx : order) {
    if (labels[idx] != 0 && labels[idx] != 1) throw Error(Error::Kind::Domain, "fit_mdlp: labels must be 0/1");
    if (groups.empty() || groups.back().value != values[idx]) groups.push_back({values[idx], {0.0, 0.0}});
    groups.back().counts[labels[idx]] += 1.0;
  }
  return MdlpSplitter(std::move(groups)).run();
}

DiscretizationModel fit_all(const Matrix& features, const Labels& labels) {
  if (features.rows() != labels.size()) throw Error(Error::Kind::Dimension, "fit_all: row/label mismatch");
  if (features.empty()) throw Error(Error::Kind::EmptyInput, "fit_all: empty dataset");
  DiscretizationModel model;
  model.cuts.reserve(features.cols());
  for (std::size_t j = 0; j < features.cols(); ++j) model.cuts.push_back(fit_mdlp(features.column(j), labels));
  return model;
}

DiscretizationModel fit_all(const DefectDataset& ds) { return fit_all(ds.rows, ds.labels); }

BinMatrix apply(const DiscretizationModel& model, const Matrix& features) {
  if (features.cols() != model.num_features())
    throw Error(Error::Kind::Dimension, "apply: feature count does not match the discretization model");
  BinMatrix out{features.rows(), features.cols(), std::vector<int>(features.rows() * features.cols())};
  for (std::size_t r = 0; r < features.rows(); ++r)
    for (std::size_t j = 0; j < features.cols(); ++j)
      out.bins[r * out.cols + j] = static_cast<int>(model.bin_of(j, features(r, j)));
  return out;
}

}  // namespace cpdp
