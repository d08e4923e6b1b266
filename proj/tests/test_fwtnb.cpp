#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "cpdp/fwtnb.hpp"

using namespace cpdp;

namespace {

struct Toy {
  BinMatrix bins;
  Labels labels;
  DiscretizationModel disc;
};

// Random discretized data with `k` features of up to `max_bins` bins each.
Toy random_toy(Rng& rng, std::size_t n, std::size_t k, std::size_t max_bins) {
  Toy t;
  t.disc.cuts.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t b = 1 + rng.below(max_bins);
    for (std::size_t c = 1; c < b; ++c) t.disc.cuts[j].push_back(static_cast<double>(c));
  }
  t.bins.rows = n;
  t.bins.cols = k;
  for (std::size_t i = 0; i < n; ++i) {
    t.labels.push_back(rng.uniform() < 0.35 ? 1 : 0);
    for (std::size_t j = 0; j < k; ++j) t.bins.bins.push_back(static_cast<int>(rng.below(t.disc.bin_count(j))));
  }
  return t;
}

// Direct product-form weighted naive Bayes with per-feature exponents.
int oracle_label(const Toy& t, std::span<const double> w, std::span<const double> e, std::span<const int> u) {
  double score[2];
  double wc[2] = {0, 0};
  for (std::size_t i = 0; i < t.bins.rows; ++i) wc[t.labels[i]] += w[i];
  for (int c = 0; c < 2; ++c) {
    double s = (wc[c] + 1.0) / (wc[0] + wc[1] + 2.0);
    for (std::size_t j = 0; j < t.bins.cols; ++j) {
      double num = 0.0;
      for (std::size_t i = 0; i < t.bins.rows; ++i)
        if (t.labels[i] == c && t.bins(i, j) == u[j]) num += w[i];
      s *= std::pow((num + 1.0) / (wc[c] + static_cast<double>(t.disc.bin_count(j))), e[j]);
    }
    score[c] = s;
  }
  return score[1] > score[0] ? 1 : 0;
}

}  // namespace

TEST_CASE("target ranges") {
  Matrix t(3, 2);
  t(0, 0) = 1, t(1, 0) = 5, t(2, 0) = 3;
  t(0, 1) = t(1, 1) = t(2, 1) = 7;
  const auto r = target_ranges(t);
  CHECK(r.min == std::vector<double>{1, 7});
  CHECK(r.max == std::vector<double>{5, 7});
  CHECK_THROWS_AS(target_ranges(Matrix(0, 2)), Error);
}

TEST_CASE("similarity and gravitation weights") {
  Matrix s(3, 3);
  const double in[] = {1, 1, 1}, out[] = {-5, 9, 9}, mixed[] = {1, 9, 1};
  for (int j = 0; j < 3; ++j) s(0, j) = in[j], s(1, j) = out[j], s(2, j) = mixed[j];
  TargetRanges r{{0, 0, 0}, {2, 2, 2}};
  const auto mic = MicProfile::from_values({0.5, 0.25, 0.125});
  const auto m = similarity(s, r, mic);
  CHECK(m[0] == doctest::Approx(mic.mic_sum));
  CHECK(m[1] == 0.0);
  CHECK(m[2] == doctest::Approx(0.625));
  CHECK(similarity(s, r, MicProfile::uniform(3)) == std::vector<double>{3, 0, 2});
  CHECK_THROWS_AS(similarity(s, r, MicProfile::uniform(2)), Error);

  const std::vector<double> scores{5.0, 0.0, 3.0};
  const auto w = gravitation_weights(scores, 5.0);
  CHECK(w[0] == doctest::Approx(5.0));
  CHECK(w[1] == 0.0);
  CHECK(w[2] == doctest::Approx(1.0 / 3.0));

  const auto wn = normalized_gravitation_weights(scores, 5.0);
  CHECK(wn[0] == doctest::Approx(1.0));
  CHECK(wn[2] == doctest::Approx(0.6 / (1.4 * 1.4)));
  CHECK(normalized_gravitation_weights(scores, 0.0) == std::vector<double>{0, 0, 0});
}

TEST_CASE("gravitation weights increase with the score") {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const double total = 0.1 + 20.0 * rng.uniform();
    std::vector<double> s(100);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = total * static_cast<double>(i) / 99.0;
    const auto w = gravitation_weights(s, total);
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] > w[i - 1]);
  }
}

TEST_CASE("weighted prior with uniform weights") {
  Toy t;
  t.bins = {10, 1, std::vector<int>(10, 0)};
  t.labels = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  t.disc.cuts = {{}};
  const std::vector<double> w(10, 1.0);
  const auto m = fit(t.bins, t.labels, w, MicProfile::uniform(1), 1.0, t.disc);
  CHECK(m.prior(1) == doctest::Approx(5.0 / 12.0).epsilon(1e-12));
  CHECK(m.prior(0) + m.prior(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty class falls back to the Laplace floor") {
  Toy t;
  t.bins = {4, 1, {0, 1, 2, 1}};
  t.labels = {0, 0, 0, 0};
  t.disc.cuts = {{1.0, 2.0}};
  const auto m = fit(t.bins, t.labels, std::vector<double>(4, 2.0), MicProfile::uniform(1), 1.0, t.disc);
  for (std::size_t v = 0; v < 3; ++v) CHECK(m.conditional(0, v, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("prior dominance decides identical conditionals") {
  Toy t;
  t.bins = {10, 1, std::vector<int>(10, 0)};
  t.labels = Labels(10, 1);
  t.labels[0] = 0;
  t.disc.cuts = {{}};
  std::vector<double> w(10, 100.0);
  const auto m = fit(t.bins, t.labels, w, MicProfile::uniform(1), 1.0, t.disc);
  const std::vector<int> u{0};
  CHECK(m.prior(1) > 0.85);
  CHECK(m.predict(u).label == 1);
}

TEST_CASE("probabilities are normalized and bins validated") {
  Rng rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = random_toy(rng, 40, 4, 4);
    std::vector<double> w(40);
    for (auto& x : w) x = rng.uniform() * 3.0;
    const auto m = fit(t.bins, t.labels, w, MicProfile::from_values({0.1, 0.4, 0.0, 0.9}), 1.0, t.disc);
    CHECK(m.prior(0) + m.prior(1) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 0; j < 4; ++j)
      for (int c = 0; c < 2; ++c) {
        double s = 0.0;
        for (std::size_t v = 0; v < m.bin_count(j); ++v) {
          const double p = m.conditional(j, v, c);
          CHECK(p > 0.0);
          CHECK(p <= 1.0);
          if (m.bin_count(j) > 1) CHECK(p < 1.0);
          s += p;
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    const auto p = m.predict(t.bins.row(0));
    CHECK(p.posterior[0] + p.posterior[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto t = random_toy(rng, 10, 2, 2);
  const auto m = fit(t.bins, t.labels, std::vector<double>(10, 1.0), MicProfile::uniform(2), 1.0, t.disc);
  CHECK_THROWS_AS(m.predict(std::vector<int>{0, 7}), Error);
  CHECK_THROWS_AS(m.predict(std::vector<int>{0}), Error);
  CHECK_THROWS_AS(fit(t.bins, t.labels, std::vector<double>(3, 1.0), MicProfile::uniform(2), 1.0, t.disc), Error);
}

TEST_CASE("exponents") {
  Rng rng(23);
  const auto t = random_toy(rng, 10, 4, 3);
  const std::vector<double> w(10, 1.0);
  const auto m = fit(t.bins, t.labels, w, MicProfile::uniform(4), 2.0, t.disc);
  for (double e : m.exponents()) CHECK(e == doctest::Approx(std::exp(1.0 / (4.0 * 4.0))));

  const auto mic = MicProfile::from_values({0.9, 0.1, 0.5, 0.0});
  double previous = std::numeric_limits<double>::infinity();
  for (double sigma : {0.2, 0.5, 1.0, 2.0, 10.0, 1e3}) {
    const auto e = fit(t.bins, t.labels, w, mic, sigma, t.disc).exponents();
    double worst = 0.0;
    for (double x : e) worst = std::max(worst, std::abs(x - 1.0));
    CHECK(worst < previous);
    previous = worst;
  }
}

TEST_CASE("log-space scoring agrees with the direct product") {
  Rng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng.below(5);
    const auto t = random_toy(rng, 6 + rng.below(20), k, 3);
    std::vector<double> w(t.bins.rows), mic_values(k);
    for (auto& x : w) x = rng.uniform() * 4.0;
    for (auto& x : mic_values) x = rng.uniform();
    const auto mic = MicProfile::from_values(mic_values);
    // Small sigma with k = 1 gives exponents near e^11, where the raw
    // product oracle itself underflows; keep it in its representable range.
    const double sigma = 1.0 + rng.uniform() * 2.0;
    const auto m = fit(t.bins, t.labels, w, mic, sigma, t.disc);
    const auto e = m.exponents();
    const std::vector<double> ones(k, 1.0);
    for (std::size_t r = 0; r < t.bins.rows; ++r) {
      CHECK(m.predict(t.bins.row(r)).label == oracle_label(t, w, e, t.bins.row(r)));
      CHECK(m.tnb_predict(t.bins.row(r)).label == oracle_label(t, w, ones, t.bins.row(r)));
    }
  }
}

TEST_CASE("huge sigma reduces to TNB") {
  Rng rng(25);
  const auto t = random_toy(rng, 200, 6, 4);
  std::vector<double> w(200), mic_values(6);
  for (auto& x : w) x = rng.uniform();
  for (auto& x : mic_values) x = rng.uniform();
  const auto m = fit(t.bins, t.labels, w, MicProfile::from_values(mic_values), 1e6, t.disc);
  for (std::size_t r = 0; r < 200; ++r) {
    const auto a = m.predict(t.bins.row(r));
    const auto b = m.tnb_predict(t.bins.row(r));
    CHECK(a.label == b.label);
    CHECK(std::abs(a.posterior[1] - b.posterior[1]) < 1e-9);
  }
}

TEST_CASE("ties go to the non-defective class") {
  Toy t;
  t.bins = {2, 1, {0, 0}};
  t.labels = {0, 1};
  t.disc.cuts = {{}};
  const auto m = fit(t.bins, t.labels, std::vector<double>{1.0, 1.0}, MicProfile::uniform(1), 1.0, t.disc);
  CHECK(m.predict(std::vector<int>{0}).label == 0);
}

TEST_CASE("json round trip") {
  Rng rng(26);
  const auto t = random_toy(rng, 30, 3, 4);
  std::vector<double> w(30, 1.5);
  const auto m = fit(t.bins, t.labels, w, MicProfile::from_values({0.2, 0.7, 0.1}), 0.8, t.disc);
  const auto doc = m.to_json();
  CHECK(doc["format"] == "cpdp-fwtnb");
  CHECK(doc["version"] == FwtnbModel::kFormatVersion);
  const auto back = FwtnbModel::from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.sigma() == 0.8);
  CHECK(back.discretizer().cuts == t.disc.cuts);
  for (std::size_t r = 0; r < 30; ++r) CHECK(back.predict(t.bins.row(r)).label == m.predict(t.bins.row(r)).label);

  auto broken = doc;
  broken["version"] = 99;
  CHECK_THROWS_AS(FwtnbModel::from_json(broken), Error);
  broken = doc;
  broken["priors"] = {0.9, 0.9};
  CHECK_THROWS_AS(FwtnbModel::from_json(broken), Error);
  broken = doc;
  broken.erase("mic");
  CHECK_THROWS_AS(FwtnbModel::from_json(broken), Error);
}
