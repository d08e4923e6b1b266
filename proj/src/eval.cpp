#include "cpdp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace cpdp {
namespace {

constexpr double kSignificance = 0.05;
constexpr std::size_t kExactLimit = 16;

void require_nonempty(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.empty() || b.empty()) throw Error(Error::Kind::EmptyInput, std::string(what) + ": empty sample");
}

double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }

struct RankInfo {
  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum over tie groups of t^3 - t
  bool has_ties = false;
};

RankInfo rank_a(std::span<const double> a, std::span<const double> b) {
  struct Item {
    double v;
    bool from_a;
  };
  std::vector<Item> pooled;
  pooled.reserve(a.size() + b.size());
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::stable_sort(pooled.begin(), pooled.end(), [](const Item& x, const Item& y) { return x.v < y.v; });

  RankInfo info;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1].v == pooled[i].v) ++j;
    const double t = static_cast<double>(j - i + 1);
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t m = i; m <= j; ++m)
      if (pooled[m].from_a) info.rank_sum_a += midrank;
    if (t > 1.0) {
      info.has_ties = true;
      info.tie_term += t * t * t - t;
    }
    i = j + 1;
  }
  return info;
}

double mean(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

}  // namespace

ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted) {
  if (actual.size() != predicted.size()) throw Error(Error::Kind::Dimension, "confusion: length mismatch");
  if (actual.empty()) throw Error(Error::Kind::EmptyInput, "confusion: no predictions");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool pos = actual[i] == 1;
    const bool pred = predicted[i] == 1;
    if (pos && pred) ++cm.tp;
    else if (pos) ++cm.fn;
    else if (pred) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

EvalRecord metrics(const ConfusionMatrix& cm) {
  const auto tp = static_cast<double>(cm.tp);
  const auto fn = static_cast<double>(cm.fn);
  const auto fp = static_cast<double>(cm.fp);
  const auto tn = static_cast<double>(cm.tn);

  EvalRecord r;
  r.pd = ratio_or_zero(tp, tp + fn);
  r.pf = ratio_or_zero(fp, fp + tn);
  r.g_measure = ratio_or_zero(2.0 * r.pd * (1.0 - r.pf), r.pd + (1.0 - r.pf));

  const double fp_den = (cm.tp == 0 && cm.fp == 0) ? 1.0 : fp;
  const double den = std::sqrt((tp + fp_den) * (tp + fn) * (tn + fp_den) * (tn + fn));
  r.mcc = ratio_or_zero(tp * tn - fp * fn, den);
  return r;
}

std::string_view effect_name(Effect e) noexcept {
  switch (e) {
    case Effect::Negligible: return "Negligible";
    case Effect::Small: return "Small";
    case Effect::Medium: return "Medium";
    case Effect::Large: return "Large";
  }
  return "?";
}

std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::Win: return "Win";
    case Verdict::Tie: return "Tie";
    case Verdict::Lose: return "Lose";
  }
  return "?";
}

double wilcoxon_exact(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b, "wilcoxon_exact");
  const RankInfo info = rank_a(a, b);
  if (info.has_ties) throw Error(Error::Kind::Domain, "wilcoxon_exact: samples contain ties");
  const std::size_t na = a.size();
  const std::size_t n = a.size() + b.size();
  const std::size_t max_sum = n * (n + 1) / 2;

  // ways[m][s]: subsets of {1..r} with m elements summing to s, built over r.
  std::vector<std::vector<double>> ways(na + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t r = 1; r <= n; ++r)
    for (std::size_t m = std::min(r, na); m >= 1; --m)
      for (std::size_t s = max_sum; s >= r; --s) ways[m][s] += ways[m - 1][s - r];

  const auto w = static_cast<std::size_t>(std::llround(info.rank_sum_a));
  double total = 0.0, low = 0.0, high = 0.0;
  for (std::size_t s = 0; s <= max_sum; ++s) {
    total += ways[na][s];
    if (s <= w) low += ways[na][s];
    if (s >= w) high += ways[na][s];
  }
  return std::min(1.0, 2.0 * std::min(low, high) / total);
}

double wilcoxon_normal(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b, "wilcoxon_normal");
  const RankInfo info = rank_a(a, b);
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  const double n = na + nb;
  const double mu = na * (n + 1.0) / 2.0;
  const double tie_adjust = n > 1.0 ? info.tie_term / (n * (n - 1.0)) : 0.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_adjust);
  if (var <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(info.rank_sum_a - mu) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double wilcoxon_ranksum(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b, "wilcoxon_ranksum");
  if (a.size() + b.size() <= kExactLimit && !rank_a(a, b).has_ties) return wilcoxon_exact(a, b);
  return wilcoxon_normal(a, b);
}

Effect effect_size(double delta) noexcept {
  const double d = std::abs(delta);
  if (d < 0.147) return Effect::Negligible;
  if (d < 0.33) return Effect::Small;
  if (d < 0.474) return Effect::Medium;
  return Effect::Large;
}

CliffsDelta cliffs_delta(std::span<const double> a, std::span<const double> b) {
  require_nonempty(a, b, "cliffs_delta");
  std::vector<double> sorted_b(b.begin(), b.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  long long dominance = 0;
  for (double x : a) {
    const auto below = std::lower_bound(sorted_b.begin(), sorted_b.end(), x) - sorted_b.begin();
    const auto above = sorted_b.end() - std::upper_bound(sorted_b.begin(), sorted_b.end(), x);
    dominance += below - above;
  }
  CliffsDelta out;
  out.delta = static_cast<double>(dominance) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
  out.effect = effect_size(out.delta);
  return out;
}

Verdict win_tie_lose(std::span<const double> a, std::span<const double> b) {
  if (wilcoxon_ranksum(a, b) >= kSignificance) return Verdict::Tie;
  return mean(a) > mean(b) ? Verdict::Win : Verdict::Lose;
}

StatResult compare_samples(std::span<const double> a, std::span<const double> b) {
  StatResult r;
  r.p_value = wilcoxon_ranksum(a, b);
  const auto cd = cliffs_delta(a, b);
  r.delta = cd.delta;
  r.effect = cd.effect;
  r.verdict = r.p_value >= kSignificance ? Verdict::Tie : (mean(a) > mean(b) ? Verdict::Win : Verdict::Lose);
  return r;
}

}  // namespace cpdp
