#include "cpdp/mic.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

// Approximate MIC search: equipartition one axis into q rows, collapse the
// other axis into (super)clumps, and choose the best column boundaries among
// clump edges by dynamic programming. Entropies use natural logs; the
// normalization by log(min(columns, rows)) makes the base irrelevant.

namespace cpdp {
namespace {

std::vector<std::size_t> stable_argsort(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

/// Splits sorted values into `bins` rows of near-equal mass. Tied values
/// always share a row. Returns the number of rows actually produced.
int equipartition(std::span<const double> sorted, int bins, std::vector<int>& out) {
  const auto n = static_cast<int>(sorted.size());
  out.assign(sorted.size(), 0);
  double rowsize = static_cast<double>(n) / bins;
  int i = 0;
  int h = 0;
  int curr = 0;
  while (i < n) {
    int s = 1;
    for (int j = i + 1; j < n && sorted[j] == sorted[i]; ++j) ++s;
    if (h != 0 && std::fabs(h + s - rowsize) >= std::fabs(h - rowsize)) {
      ++curr;
      h = 0;
      rowsize = static_cast<double>(n - i) / (bins - curr);
    }
    for (int j = 0; j < s; ++j) out[i + j] = curr;
    i += s;
    h += s;
  }
  return curr + 1;
}

/// Clumps: maximal runs of x-sorted points sharing a row, with tied x values
/// that straddle rows merged into one clump.
int clumps_partition(std::span<const double> xs, const std::vector<int>& rows, std::vector<int>& out) {
  const auto n = static_cast<int>(xs.size());
  std::vector<int> tilde(rows);
  int marker = -1;
  int i = 0;
  while (i < n) {
    int s = 1;
    bool mixed = false;
    for (int j = i + 1; j < n && xs[j] == xs[i]; ++j) {
      if (tilde[i] != tilde[j]) mixed = true;
      ++s;
    }
    if (s > 1 && mixed) {
      for (int j = 0; j < s; ++j) tilde[i + j] = marker;
      --marker;
    }
    i += s;
  }
  out.assign(xs.size(), 0);
  int id = 0;
  for (int j = 1; j < n; ++j) {
    if (tilde[j] != tilde[j - 1]) ++id;
    out[j] = id;
  }
  return id + 1;
}

int superclumps_partition(std::span<const double> xs, int max_clumps, const std::vector<int>& rows,
                          std::vector<int>& out) {
  int p = clumps_partition(xs, rows, out);
  if (p > max_clumps) {
    std::vector<double> as_values(out.begin(), out.end());
    p = equipartition(as_values, max_clumps, out);
  }
  return p;
}

double plogp_sum(std::initializer_list<double> probs) {
  double sum = 0.0;
  for (double p : probs)
    if (p > 0.0) sum -= p * std::log(p);
  return sum;
}

/// Best normalized mutual information for every column count 2..max_cols,
/// given fixed rows (q of them) and clump assignments (p clumps) over
/// x-sorted points. Result index 0 corresponds to two columns.
std::vector<double> optimize_columns(const std::vector<int>& rows, int q, const std::vector<int>& clumps,
                                     int p, int max_cols) {
  std::vector<double> score(static_cast<std::size_t>(std::max(max_cols - 1, 0)), 0.0);
  if (p == 1 || max_cols < 2) return score;
  const auto n = rows.size();

  // c[t]: points in clumps 1..t; cumhist[r][t]: those of them in row r.
  std::vector<double> c(p + 1, 0.0);
  std::vector<std::vector<double>> cumhist(q, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    c[clumps[i] + 1] += 1.0;
    cumhist[rows[i]][clumps[i] + 1] += 1.0;
  }
  for (int t = 1; t <= p; ++t) {
    c[t] += c[t - 1];
    for (int r = 0; r < q; ++r) cumhist[r][t] += cumhist[r][t - 1];
  }

  double hq = 0.0;
  for (int r = 0; r < q; ++r) {
    const double pr = cumhist[r][p] / static_cast<double>(n);
    if (pr > 0.0) hq -= pr * std::log(pr);
  }

  // Entropy of rows among points in clumps s+1..t.
  std::vector<std::vector<double>> hp2q(p + 1, std::vector<double>(p + 1, 0.0));
  for (int t = 3; t <= p; ++t) {
    for (int s = 2; s < t; ++s) {
      const double total = c[t] - c[s];
      double h = 0.0;
      for (int r = 0; r < q; ++r) {
        const double pr = (cumhist[r][t] - cumhist[r][s]) / total;
        if (pr > 0.0) h -= pr * std::log(pr);
      }
      hp2q[s][t] = h;
    }
  }

  const int cols = max_cols;
  std::vector<std::vector<double>> best(p + 1, std::vector<double>(cols + 1, 0.0));

  for (int t = 2; t <= p; ++t) {
    double f_max = -DBL_MAX;
    const double total = c[t];
    for (int s = 1; s <= t; ++s) {
      const double hp = s == t ? 0.0 : plogp_sum({c[s] / total, (c[t] - c[s]) / total});
      double hpq = 0.0;
      for (int r = 0; r < q; ++r) {
        const double a = cumhist[r][s] / total;
        const double b = (cumhist[r][t] - cumhist[r][s]) / total;
        if (a > 0.0) hpq -= a * std::log(a);
        if (b > 0.0) hpq -= b * std::log(b);
      }
      const double f = hp - hpq;
      if (f > f_max) {
        best[t][2] = hq + f;
        f_max = f;
      }
    }
  }

  for (int l = 3; l <= cols; ++l) {
    for (int t = l; t <= p; ++t) {
      const double ct = c[t];
      double f_max = -DBL_MAX;
      for (int s = l - 1; s <= t; ++s) {
        const double cs = c[s];
        const double f = (cs / ct) * (best[s][l - 1] - hq) - ((ct - cs) / ct) * hp2q[s][t];
        if (f > f_max) {
          best[t][l] = hq + f;
          f_max = f;
        }
      }
    }
  }

  for (int l = p + 1; l <= cols; ++l) best[p][l] = best[p][p];

  for (int l = 2; l <= cols; ++l)
    score[l - 2] = best[p][l] / std::min(std::log(static_cast<double>(l)), std::log(static_cast<double>(q)));
  return score;
}

/// One orientation: y is equipartitioned, x is optimized.
double oriented_max(std::span<const double> x, std::span<const double> y, double bound, double clump_factor) {
  const auto n = x.size();
  const auto ix = stable_argsort(x);
  const auto iy = stable_argsort(y);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[ix[i]];
    ys[i] = y[iy[i]];
  }

  double best = 0.0;
  std::vector<int> rows_by_y, rows_by_point(n), rows_by_x(n), clumps;
  const int max_rows = std::max(static_cast<int>(std::floor(bound / 2.0)), 2);
  for (int q = 2; q <= max_rows; ++q) {
    const int max_cols = static_cast<int>(std::floor(bound / q));
    if (max_cols < 2) continue;
    const int q_actual = equipartition(ys, q, rows_by_y);
    for (std::size_t j = 0; j < n; ++j) rows_by_point[iy[j]] = rows_by_y[j];
    for (std::size_t j = 0; j < n; ++j) rows_by_x[j] = rows_by_point[ix[j]];
    const int max_clumps = std::max(static_cast<int>(clump_factor * max_cols), 1);
    const int p = superclumps_partition(xs, max_clumps, rows_by_x, clumps);
    for (double s : optimize_columns(rows_by_x, q_actual, clumps, p, max_cols)) best = std::max(best, s);
  }
  return best;
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

}  // namespace

void MineParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(Error::Kind::Config, "MIC alpha must lie in (0, 1]");
  if (!(clumps >= 1.0)) throw Error(Error::Kind::Config, "MIC clump factor must be >= 1");
}

MicProfile MicProfile::from_values(std::vector<double> values) {
  MicProfile p;
  p.mic = std::move(values);
  p.mic_sum = std::accumulate(p.mic.begin(), p.mic.end(), 0.0);
  return p;
}

MicProfile MicProfile::uniform(std::size_t k) { return from_values(std::vector<double>(k, 1.0)); }

double mic_score(std::span<const double> x, std::span<const double> y, const MineParams& params) {
  params.validate();
  if (x.size() != y.size()) throw Error(Error::Kind::Dimension, "mic_score: length mismatch");
  if (x.size() < 4) throw Error(Error::Kind::InsufficientData, "mic_score: need at least 4 points");
  if (is_constant(x) || is_constant(y)) return 0.0;

  const double bound = std::max(std::pow(static_cast<double>(x.size()), params.alpha), 4.0);
  const double mic = std::max(oriented_max(x, y, bound, params.clumps), oriented_max(y, x, bound, params.clumps));
  return std::clamp(mic, 0.0, 1.0);
}

MicProfile mic_profile(const Matrix& features, const Labels& labels, const MineParams& params) {
  if (features.rows() != labels.size()) throw Error(Error::Kind::Dimension, "mic_profile: row/label mismatch");
  const std::vector<double> y(labels.begin(), labels.end());
  std::vector<double> mic(features.cols());
  for (std::size_t j = 0; j < features.cols(); ++j) mic[j] = mic_score(features.column(j), y, params);
  return MicProfile::from_values(std::move(mic));
}

MicProfile mic_profile(const DefectDataset& ds, const MineParams& params) {
  return mic_profile(ds.rows, ds.labels, params);
}

}  // namespace cpdp
