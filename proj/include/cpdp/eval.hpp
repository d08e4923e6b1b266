#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "cpdp/common.hpp"

namespace cpdp {

/// Defective modules are the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fn + fp + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct EvalRecord {
  double pd = 0.0;
  double pf = 0.0;
  double g_measure = 0.0;
  double mcc = 0.0;
};

ConfusionMatrix confusion(std::span<const int> actual, std::span<const int> predicted);

/// PD, PF, G-Measure and MCC. Zero denominators yield 0. When tp = 0 and
/// fp = 0 the MCC denominator is evaluated with fp = 1, which gives 0.
EvalRecord metrics(const ConfusionMatrix& cm);

enum class Effect { Negligible, Small, Medium, Large };
enum class Verdict { Win, Tie, Lose };

std::string_view effect_name(Effect e) noexcept;
std::string_view verdict_name(Verdict v) noexcept;

/// Two-sided Wilcoxon rank-sum p-value. Exact null distribution when the
/// pooled size is at most 16 and there are no ties, otherwise the normal
/// approximation with tie and continuity corrections.
double wilcoxon_ranksum(std::span<const double> a, std::span<const double> b);
double wilcoxon_exact(std::span<const double> a, std::span<const double> b);
double wilcoxon_normal(std::span<const double> a, std::span<const double> b);

struct CliffsDelta {
  double delta = 0.0;
  Effect effect = Effect::Negligible;
};

CliffsDelta cliffs_delta(std::span<const double> a, std::span<const double> b);
Effect effect_size(double delta) noexcept;

/// Tie when p >= 0.05, otherwise Win when mean(a) > mean(b), else Lose.
Verdict win_tie_lose(std::span<const double> a, std::span<const double> b);

struct StatResult {
  double p_value = 1.0;
  double delta = 0.0;
  Effect effect = Effect::Negligible;
  Verdict verdict = Verdict::Tie;
};

StatResult compare_samples(std::span<const double> a, std::span<const double> b);

}  // namespace cpdp
