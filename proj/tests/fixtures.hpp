#pragma once
// Synthetic PROMISE-style data for tests. The real tera-PROMISE files are not
// redistributed with the repository; these generators reproduce their shape
// (20 class-level metrics, identifier columns, defect counts) with a
// controllable defect signal.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cpdp/dataset.hpp"

namespace cpdp::testing {

struct Table1Row {
  const char* name;
  std::size_t instances;
  std::size_t defective;
  double rate;
};

inline const std::vector<Table1Row>& table1() {
  static const std::vector<Table1Row> rows = {
      {"ant-1.7", 745, 166, 0.2228},     {"camel-1.0", 339, 13, 0.0383}, {"ivy-1.4", 241, 16, 0.0664},
      {"jedit-4.0", 306, 75, 0.2451},    {"log4j-1.0", 135, 34, 0.2519}, {"poi-2.0", 314, 37, 0.1178},
      {"prop-6", 660, 66, 0.1000},       {"tomcat", 858, 77, 0.0897},    {"velocity-1.6", 229, 78, 0.3406},
      {"xalan-2.4", 723, 110, 0.1521},   {"xerces-1.2", 440, 71, 0.1614},
  };
  return rows;
}

inline const std::vector<std::string>& ckjm_metrics() {
  static const std::vector<std::string> names = {"wmc", "dit",  "noc", "cbo", "rfc", "lcom", "ca",
                                                 "ce",  "npm",  "lcom3", "loc", "dam", "moa", "mfa",
                                                 "cam", "ic",   "cbm", "amc", "max_cc", "avg_cc"};
  return names;
}

/// Feature rows for `n` modules of which the first `defective` (after a
/// seeded shuffle) are defective. Defective modules get larger size and
/// coupling metrics; `project_scale` shifts the whole project.
inline void synth_rows(std::size_t n, std::size_t defective, std::uint64_t seed, double project_scale,
                       Matrix& rows, std::vector<int>& bug_counts) {
  Rng rng(seed);
  std::vector<int> is_defective(n, 0);
  for (std::size_t i = 0; i < defective; ++i) is_defective[i] = 1;
  for (std::size_t i = n - 1; i > 0; --i) std::swap(is_defective[i], is_defective[rng.below(i + 1)]);

  const std::size_t k = ckjm_metrics().size();
  rows = Matrix(n, k);
  bug_counts.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double boost = is_defective[i] ? 2.2 : 1.0;
    // Shared latent size drives the correlated metrics.
    const double size = project_scale * boost * std::exp(1.2 * (rng.uniform() - 0.5) + 1.5 * rng.uniform());
    for (std::size_t j = 0; j < k; ++j) {
      const double noise = 0.5 + rng.uniform();
      double v;
      if (j == 11 || j == 13 || j == 14 || j == 9)  // ratio-like metrics in [0, 1] or [0, 2]
        v = std::round(1000.0 * std::min(1.0, rng.uniform() * (is_defective[i] ? 1.0 : 0.8))) / 1000.0;
      else if (j == 1 || j == 2 || j == 15)  // small counts
        v = std::floor(rng.uniform() * 4.0 * (is_defective[i] ? 1.3 : 1.0));
      else if (j == 10)  // lines of code
        v = std::round(60.0 * size * noise);
      else
        v = std::round(size * noise * (1.0 + static_cast<double>(j % 5)));
      rows(i, j) = v;
    }
    if (is_defective[i]) bug_counts[i] = 1 + static_cast<int>(rng.below(3));
  }
}

inline DefectDataset synthetic_dataset(const std::string& name, std::size_t n, std::size_t defective,
                                       std::uint64_t seed, double project_scale = 1.0) {
  DefectDataset ds;
  ds.name = name;
  ds.feature_names = ckjm_metrics();
  std::vector<int> bugs;
  synth_rows(n, defective, seed, project_scale, ds.rows, bugs);
  for (int b : bugs) ds.labels.push_back(b > 0 ? 1 : 0);
  return ds;
}

/// Writes a PROMISE-layout CSV (name,version,name.1, metrics..., bug).
inline void write_promise_csv(const std::filesystem::path& path, const std::string& name, std::size_t n,
                              std::size_t defective, std::uint64_t seed, double project_scale = 1.0) {
  Matrix rows;
  std::vector<int> bugs;
  synth_rows(n, defective, seed, project_scale, rows, bugs);
  const auto dash = name.rfind('-');
  const std::string project = dash == std::string::npos ? name : name.substr(0, dash);
  const std::string version = dash == std::string::npos ? "1.0" : name.substr(dash + 1);
  std::ofstream out(path);
  out << "name,version,name.1";
  for (const auto& m : ckjm_metrics()) out << ',' << m;
  out << ",bug\n";
  out.precision(12);
  for (std::size_t i = 0; i < n; ++i) {
    out << project << ',' << version << ",org." << project << ".C" << i;
    for (std::size_t j = 0; j < rows.cols(); ++j) out << ',' << rows(i, j);
    out << ',' << bugs[i] << '\n';
  }
}

/// Writes all eleven Table 1 shaped fixtures into `dir`.
inline void write_table1_fixtures(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::uint64_t seed = 1000;
  for (const auto& r : table1()) {
    const double scale = 0.7 + 0.06 * static_cast<double>(seed % 11);
    write_promise_csv(dir / (std::string(r.name) + ".csv"), r.name, r.instances, r.defective, seed++, scale);
  }
}

}  // namespace cpdp::testing
