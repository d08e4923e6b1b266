// Command-line front end: stats, run, compare, sweep, report.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cpdp/harness.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::vector<cpdp::PairResult> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw cpdp::Error(cpdp::Error::Kind::Format, "cannot open " + path.string());
  return cpdp::read_results_csv(in);
}

int cmd_stats(const std::filesystem::path& dir, const std::string& bug_column) {
  cpdp::LoadOptions opts;
  opts.bug_column = bug_column;
  const auto sets = cpdp::load_directory(dir, opts);
  std::printf("%-16s %8s %10s %10s %8s\n", "dataset", "metrics", "instances", "defective", "rate");
  for (const auto& ds : sets) {
    const auto s = cpdp::summarize(ds);
    std::printf("%-16s %8zu %10zu %10zu %8.4f\n", s.name.c_str(), s.n_metrics, s.n_instances, s.n_defective,
                s.defective_rate);
    if (!ds.skipped_columns.empty()) {
      std::printf("  skipped:");
      for (const auto& c : ds.skipped_columns) std::printf(" %s", c.c_str());
      std::printf("\n");
    }
  }
  return 0;
}

int cmd_run(const std::filesystem::path& config, const std::filesystem::path& output_override) {
  auto cfg = cpdp::load_config(config);
  if (!output_override.empty()) cfg.output = output_override;
  const auto results = cpdp::run_experiment(cfg);

  std::ofstream out(cfg.output);
  if (!out) throw cpdp::Error(cpdp::Error::Kind::Format, "cannot write " + cfg.output.string());
  cpdp::write_results_csv(out, results);

  auto summary_path = cfg.output;
  summary_path.replace_extension(".summary.txt");
  const auto summary = cpdp::render_summary(results, cfg.method.name());
  std::ofstream(summary_path) << summary;
  std::cout << summary;
  return 0;
}

int cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::cout << cpdp::render_comparison(cpdp::compare(read_results(a), read_results(b)));
  return 0;
}

int cmd_sweep(const std::string& param, const std::vector<double>& values, const std::filesystem::path& config,
              const std::filesystem::path& output) {
  const auto p = param == "lambda" ? cpdp::SweepParam::Lambda : cpdp::SweepParam::Sigma;
  const auto cfg = cpdp::load_config(config);
  const auto rows = cpdp::sweep(p, values, cfg);
  if (output.empty()) {
    cpdp::write_sweep_csv(std::cout, p, rows);
  } else {
    std::ofstream out(output);
    cpdp::write_sweep_csv(out, p, rows);
  }
  return 0;
}

int cmd_report(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    std::ifstream in(path);
    if (!in) throw cpdp::Error(cpdp::Error::Kind::Format, "cannot open " + path.string());
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw cpdp::Error(cpdp::Error::Kind::Format, std::string("model: ") + e.what());
    }
    const auto model = cpdp::FwtnbModel::from_json(doc);
    std::printf("priors: P(0)=%.6f P(1)=%.6f  sigma=%g  features=%zu\n", model.prior(0), model.prior(1),
                model.sigma(), model.num_features());
    const auto e = model.exponents();
    std::printf("%-8s %8s %8s %6s\n", "feature", "mic", "exponent", "bins");
    for (std::size_t j = 0; j < model.num_features(); ++j)
      std::printf("%-8zu %8.4f %8.4f %6zu\n", j, model.mic().mic[j], e[j], model.bin_count(j));
    return 0;
  }
  std::cout << cpdp::render_summary(read_results(path), path.filename().string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-project defect prediction with TOMO over-sampling and FWTNB"};
  app.require_subcommand(1);

  std::filesystem::path stats_dir;
  std::string bug_column = "bug";
  auto* stats = app.add_subcommand("stats", "Per-dataset instance/defect counts (before cleaning)");
  stats->add_option("dir", stats_dir, "Directory of PROMISE CSV files")->required();
  stats->add_option("--bug-column", bug_column, "Defect count column name");

  std::filesystem::path config, output;
  auto* run = app.add_subcommand("run", "Run the configured experiment");
  run->add_option("--config", config, "Experiment config file")->required();
  run->add_option("--output", output, "Results CSV (overrides config)");

  std::filesystem::path csv_a, csv_b;
  auto* cmp = app.add_subcommand("compare", "Wilcoxon/Cliff's delta comparison of two result files");
  cmp->add_option("a", csv_a, "Results CSV of the method under test")->required();
  cmp->add_option("b", csv_b, "Results CSV of the baseline")->required();

  std::string param;
  std::vector<double> values;
  auto* sw = app.add_subcommand("sweep", "Sensitivity sweep over lambda or sigma");
  sw->add_option("--param", param, "Parameter to vary")->required()->check(CLI::IsMember({"lambda", "sigma"}));
  sw->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');
  sw->add_option("--config", config, "Experiment config file")->required();
  sw->add_option("--output", output, "Sweep CSV (default: stdout)");

  std::filesystem::path report_path;
  auto* rep = app.add_subcommand("report", "Summarize a results CSV or a saved model JSON");
  rep->add_option("results", report_path, "Results CSV or model JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*stats) return cmd_stats(stats_dir, bug_column);
    if (*run) return cmd_run(config, output);
    if (*cmp) return cmd_compare(csv_a, csv_b);
    if (*sw) return cmd_sweep(param, values, config, output);
    if (*rep) return cmd_report(report_path);
  } catch (const cpdp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == cpdp::Error::Kind::Config ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
