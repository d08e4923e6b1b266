#include "cpdp/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cpdp/discretize.hpp"
#include "cpdp/sampling.hpp"

namespace cpdp {
namespace {

constexpr std::size_t kSourceCount = 7;
constexpr std::size_t kTargetCount = 5;
constexpr std::size_t kMaxRedraws = 10;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v, int digits = 3) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw Error(Error::Kind::Config, "config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw Error(Error::Kind::Config, "config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto l = lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw Error(Error::Kind::Config, "config: '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<PairSpec> parse_pairs(const std::string& v) {
  std::vector<PairSpec> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto arrow = item.find("=>");
    if (arrow == std::string::npos)
      throw Error(Error::Kind::Config, "config: pair '" + item + "' must look like source=>target");
    out.push_back({trim(item.substr(0, arrow)), trim(item.substr(arrow + 2))});
  }
  if (out.empty()) throw Error(Error::Kind::Config, "config: empty pair list");
  return out;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Matrix feature_rows(const DefectDataset& ds) { return ds.rows; }

/// Subsample of `fraction` of the rows without replacement, in original order.
DefectDataset subsample(const DefectDataset& ds, double fraction, Rng& rng) {
  const std::size_t n = ds.size();
  if (fraction >= 1.0) return ds;
  const auto keep = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(fraction * n)), 1, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < keep; ++i) std::swap(idx[i], idx[i + rng.below(n - i)]);
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());

  DefectDataset out = ds;
  out.rows = ds.rows.select_rows(idx);
  out.labels.resize(keep);
  for (std::size_t i = 0; i < keep; ++i) out.labels[i] = ds.labels[idx[i]];
  return out;
}

bool trainable(const DefectDataset& ds) { return ds.count_label(1) >= 2 && ds.count_label(0) >= 1; }

const DefectDataset& find_dataset(const std::map<std::string, DefectDataset>& by_name, const std::string& name) {
  const auto it = by_name.find(name);
  if (it == by_name.end()) throw Error(Error::Kind::Format, "dataset '" + name + "' not found");
  return it->second;
}

double metric_of(const EvalRecord& r, const std::string& name) {
  if (name == "pd") return r.pd;
  if (name == "pf") return r.pf;
  if (name == "g_measure") return r.g_measure;
  if (name == "mcc") return r.mcc;
  throw Error(Error::Kind::Config, "unknown metric '" + name + "'");
}

}  // namespace

Method Method::parse(const std::string& raw, int smote_percent) {
  const std::string name = lower(trim(raw));
  Method m;
  m.smote_percent = smote_percent;
  if (name == "tomofwtnb") {
    m.kind = MethodKind::TomoFwtnb;
  } else if (name == "tomo+tnb") {
    m.kind = MethodKind::TomoTnb;
  } else if (name == "fwtnb+smote100") {
    m.kind = MethodKind::FwtnbSmote100;
    m.smote_percent = 100;
  } else if (name == "tnb+smote100") {
    m.kind = MethodKind::SmoteTnb;
    m.smote_percent = 100;
  } else if (name == "smote+tnb") {
    m.kind = MethodKind::SmoteTnb;
  } else if (std::smatch match; std::regex_match(name, match, std::regex(R"(smote(\d+)\+tnb)"))) {
    m.kind = MethodKind::SmoteTnb;
    m.smote_percent = std::stoi(match[1].str());
  } else {
    throw Error(Error::Kind::Config, "unknown method '" + raw + "'");
  }
  if (m.smote_percent < 100 || m.smote_percent % 100 != 0)
    throw Error(Error::Kind::Config, "SMOTE percent must be a positive multiple of 100");
  return m;
}

std::string Method::name() const {
  switch (kind) {
    case MethodKind::TomoFwtnb: return "tomofwtnb";
    case MethodKind::TomoTnb: return "tomo+tnb";
    case MethodKind::SmoteTnb: return "smote" + std::to_string(smote_percent) + "+tnb";
    case MethodKind::FwtnbSmote100: return "fwtnb+smote100";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0))
    throw Error(Error::Kind::Config, "train_fraction must lie in (0, 1]");
  if (repetitions < 1) throw Error(Error::Kind::Config, "repetitions must be at least 1");
  if (!(ratio > 0.0)) throw Error(Error::Kind::Config, "ratio must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(Error::Kind::Config, "lambda must lie in [0, 1]");
  if (!(sigma > 0.0)) throw Error(Error::Kind::Config, "sigma must be positive");
  if (smote_k < 1) throw Error(Error::Kind::Config, "smote_k must be at least 1");
  mine.validate();
}

ExperimentConfig parse_config(std::istream& in, bool apply_env) {
  ExperimentConfig cfg;
  std::string method_name = "tomofwtnb";
  int smote_percent = 100;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.compare(eq, 2, "=>") == 0)
      throw Error(Error::Kind::Config, "config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "dataset_dir") cfg.dataset_dir = value;
    else if (key == "pairs") {
      if (lower(value) == "auto") cfg.pairs.reset();
      else cfg.pairs = parse_pairs(value);
    } else if (key == "method") method_name = value;
    else if (key == "smote_n") smote_percent = static_cast<int>(to_u64(key, value));
    else if (key == "ratio") cfg.ratio = to_double(key, value);
    else if (key == "lambda") cfg.lambda = to_double(key, value);
    else if (key == "sigma") cfg.sigma = to_double(key, value);
    else if (key == "repetitions") cfg.repetitions = to_u64(key, value);
    else if (key == "train_fraction") cfg.train_fraction = to_double(key, value);
    else if (key == "seed") cfg.seed = to_u64(key, value);
    else if (key == "output") cfg.output = value;
    else if (key == "model_dir") cfg.model_dir = value;
    else if (key == "bug_column") cfg.bug_column = value;
    else if (key == "interpolate") cfg.interpolate = to_bool(key, value);
    else if (key == "normalized_similarity" || key == "normalized-similarity")
      cfg.normalized_similarity = to_bool(key, value);
    else if (key == "smote_k") cfg.smote_k = to_u64(key, value);
    else if (key == "mic_alpha") cfg.mine.alpha = to_double(key, value);
    else if (key == "mic_c") cfg.mine.clumps = to_double(key, value);
    else throw Error(Error::Kind::Config, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  cfg.method = Method::parse(method_name, smote_percent);
  if (apply_env)
    if (const char* env = std::getenv("CPDP_SEED"); env != nullptr && *env != '\0')
      cfg.seed = to_u64("CPDP_SEED", env);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, bool apply_env) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::Config, "cannot open config " + path.string());
  auto cfg = parse_config(in, apply_env);
  if (!cfg.dataset_dir.empty() && cfg.dataset_dir.is_relative())
    cfg.dataset_dir = path.parent_path() / cfg.dataset_dir;
  return cfg;
}

std::vector<PairSpec> build_pairs(const std::vector<DatasetStats>& stats) {
  if (stats.size() < kSourceCount + kTargetCount - 1)
    throw Error(Error::Kind::InsufficientData, "build_pairs: need at least 11 datasets, got " +
                                                   std::to_string(stats.size()));
  std::set<std::string> names;
  for (const auto& s : stats)
    if (!names.insert(s.name).second) throw Error(Error::Kind::Format, "build_pairs: duplicate dataset " + s.name);

  auto ordered = stats;
  std::sort(ordered.begin(), ordered.end(), [](const DatasetStats& a, const DatasetStats& b) {
    if (a.defective_rate != b.defective_rate) return a.defective_rate < b.defective_rate;
    return a.name < b.name;
  });
  std::vector<std::string> sources, targets;
  for (std::size_t i = 0; i < kSourceCount; ++i) sources.push_back(ordered[i].name);
  // Largest rates first; equal rates still resolve by name.
  auto by_rate_desc = stats;
  std::sort(by_rate_desc.begin(), by_rate_desc.end(), [](const DatasetStats& a, const DatasetStats& b) {
    if (a.defective_rate != b.defective_rate) return a.defective_rate > b.defective_rate;
    return a.name < b.name;
  });
  for (std::size_t i = 0; i < kTargetCount; ++i) targets.push_back(by_rate_desc[i].name);

  std::vector<PairSpec> pairs;
  for (const auto& s : sources)
    for (const auto& t : targets)
      if (s != t) pairs.push_back({s, t});
  return pairs;
}

Summary summarize_values(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  const auto n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

std::vector<double> PairResult::metric(const std::string& name) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(metric_of(r, name));
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& source, const std::string& target,
                          std::size_t repetition, std::size_t redraw) {
  std::uint64_t h = fnv1a(target, fnv1a(std::string(1, '\0'), fnv1a(source)));
  std::uint64_t state = master ^ h;
  Rng::splitmix64(state);
  state ^= static_cast<std::uint64_t>(repetition) * 0x9e3779b97f4a7c15ULL;
  Rng::splitmix64(state);
  state ^= static_cast<std::uint64_t>(redraw) * 0xd1b54a32d192ed03ULL;
  return Rng::splitmix64(state);
}

DefectDataset prepare(const DefectDataset& raw) { return log_transform(clean(raw)); }

MethodOutcome run_method(const DefectDataset& train, const DefectDataset& target, const ExperimentConfig& cfg,
                         std::uint64_t seed) {
  if (train.num_features() != target.num_features())
    throw Error(Error::Kind::Dimension, "source and target have different metric counts");

  SyntheticBatch batch;
  if (cfg.method.uses_tomo()) {
    TomoParams tp;
    tp.ratio = cfg.ratio;
    tp.lambda = cfg.lambda;
    tp.seed = seed;
    tp.interpolate = cfg.interpolate;
    batch = tomo(train, feature_rows(target), tp);
  } else {
    const Matrix minority = train.rows_with_label(1);
    if (minority.rows() < 2) throw Error(Error::Kind::InsufficientData, "SMOTE needs at least 2 minority rows");
    const std::size_t k = std::min(cfg.smote_k, minority.rows() - 1);
    batch = smote(minority, cfg.method.smote_percent, k, seed);
  }
  const DefectDataset augmented = augment(train, batch);

  const MicProfile mic =
      cfg.method.feature_weighted() ? mic_profile(augmented, cfg.mine) : MicProfile::uniform(train.num_features());
  if (mic.mic_sum <= 0.0)
    std::cerr << "warning: every feature has zero MIC against the label (" << train.name
              << "); instance weights are all zero\n";

  const TargetRanges ranges = target_ranges(target.rows);
  const auto scores = similarity(augmented.rows, ranges, mic);
  const auto weights = cfg.normalized_similarity ? normalized_gravitation_weights(scores, mic.mic_sum)
                                                 : gravitation_weights(scores, mic.mic_sum);

  const DiscretizationModel disc = fit_all(augmented);
  const BinMatrix source_bins = apply(disc, augmented.rows);
  const BinMatrix target_bins = apply(disc, target.rows);

  MethodOutcome out;
  out.model = fit(source_bins, augmented.labels, weights, mic, cfg.sigma, disc);
  const auto predicted = out.model.predict_all(target_bins, cfg.method.feature_weighted());
  out.confusion = confusion(target.labels, predicted);
  out.record = metrics(out.confusion);
  out.synthetic_rows = batch.size();
  return out;
}

PairResult run_pair(const DefectDataset& source, const DefectDataset& target, const ExperimentConfig& cfg) {
  cfg.validate();
  PairResult result;
  result.source = source.name;
  result.target = target.name;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    std::optional<DefectDataset> train;
    std::uint64_t seed = 0;
    for (std::size_t redraw = 0; redraw <= kMaxRedraws; ++redraw) {
      seed = derive_seed(cfg.seed, source.name, target.name, rep, redraw);
      Rng rng(seed);
      auto candidate = subsample(source, cfg.train_fraction, rng);
      if (trainable(candidate)) {
        train = std::move(candidate);
        break;
      }
      if (cfg.train_fraction >= 1.0) break;
    }
    if (!train)
      throw Error(Error::Kind::InsufficientData, source.name + "=>" + target.name +
                                                     ": training sample lacks a class (need >= 2 defective and >= 1 "
                                                     "clean rows)");
    std::uint64_t method_seed = seed;
    const auto outcome = run_method(*train, target, cfg, Rng::splitmix64(method_seed));
    result.records.push_back(outcome.record);

    if (rep == 0 && !cfg.model_dir.empty()) {
      std::filesystem::create_directories(cfg.model_dir);
      std::ofstream out(cfg.model_dir / (source.name + "__" + target.name + ".json"));
      out << outcome.model.to_json().dump(2) << '\n';
    }
  }
  return result;
}

std::vector<PairResult> run_experiment(const std::vector<DefectDataset>& raw, const ExperimentConfig& cfg) {
  cfg.validate();
  std::map<std::string, DefectDataset> prepared;
  std::vector<DatasetStats> stats;
  for (const auto& ds : raw) {
    stats.push_back(summarize(ds));
    prepared.emplace(ds.name, prepare(ds));
  }
  const auto pairs = cfg.pairs ? *cfg.pairs : build_pairs(stats);
  std::vector<PairResult> results;
  results.reserve(pairs.size());
  for (const auto& p : pairs)
    results.push_back(run_pair(find_dataset(prepared, p.source), find_dataset(prepared, p.target), cfg));
  return results;
}

std::vector<PairResult> run_experiment(const ExperimentConfig& cfg) {
  LoadOptions opts;
  opts.bug_column = cfg.bug_column;
  return run_experiment(load_directory(cfg.dataset_dir, opts), cfg);
}

void write_results_csv(std::ostream& out, const std::vector<PairResult>& results) {
  out << "source,target,repetition,pd,pf,g_measure,mcc\n";
  for (const auto& pr : results)
    for (std::size_t i = 0; i < pr.records.size(); ++i) {
      const auto& r = pr.records[i];
      out << pr.source << ',' << pr.target << ',' << i << ',' << fmt_exact(r.pd) << ',' << fmt_exact(r.pf) << ','
          << fmt_exact(r.g_measure) << ',' << fmt_exact(r.mcc) << '\n';
    }
}

std::vector<PairResult> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "source,target,repetition,pd,pf,g_measure,mcc")
    throw Error(Error::Kind::Format, "results CSV: unexpected header");
  std::vector<PairResult> results;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(trim(cell));
    if (f.size() != 7) throw Error(Error::Kind::Format, "results CSV line " + std::to_string(line_no) + ": expected 7 fields");
    const auto key = std::make_pair(f[0], f[1]);
    auto [it, fresh] = index.emplace(key, results.size());
    if (fresh) results.push_back({f[0], f[1], {}});
    auto& pr = results[it->second];
    try {
      if (std::stoul(f[2]) != pr.records.size())
        throw Error(Error::Kind::Format, "results CSV line " + std::to_string(line_no) + ": repetitions out of order");
      pr.records.push_back({std::stod(f[3]), std::stod(f[4]), std::stod(f[5]), std::stod(f[6])});
    } catch (const std::logic_error&) {
      throw Error(Error::Kind::Format, "results CSV line " + std::to_string(line_no) + ": bad number");
    }
  }
  return results;
}

std::string render_summary(const std::vector<PairResult>& results, const std::string& title) {
  std::ostringstream os;
  if (!title.empty()) os << title << '\n';
  const std::vector<std::string> shown = {"g_measure", "mcc", "pd", "pf"};
  std::size_t width = std::string("Source=>Target").size();
  for (const auto& r : results) width = std::max(width, r.source.size() + r.target.size() + 2);
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  os << pad("Source=>Target", width);
  for (const auto& m : shown) os << "  " << pad(m, 13);
  os << '\n';
  std::map<std::string, std::vector<double>> means;
  for (const auto& r : results) {
    os << pad(r.source + "=>" + r.target, width);
    for (const auto& m : shown) {
      const auto s = r.summary(m);
      means[m].push_back(s.mean);
      os << "  " << pad(fmt_fixed(s.mean) + "±" + fmt_fixed(s.std), 14);
    }
    os << '\n';
  }
  if (!results.empty()) {
    os << pad("Average", width);
    for (const auto& m : shown) os << "  " << pad(fmt_fixed(summarize_values(means[m]).mean), 13);
    os << '\n';
  }
  return os.str();
}

ComparisonReport compare(const std::vector<PairResult>& a, const std::vector<PairResult>& b) {
  if (a.size() != b.size()) throw Error(Error::Kind::Format, "compare: result sets cover different pair counts");
  std::map<std::pair<std::string, std::string>, const PairResult*> b_index;
  for (const auto& r : b) b_index[{r.source, r.target}] = &r;

  ComparisonReport report;
  for (const auto& m : metric_names()) report.totals[m] = {};
  for (const auto& ra : a) {
    const auto it = b_index.find({ra.source, ra.target});
    if (it == b_index.end())
      throw Error(Error::Kind::Format, "compare: pair " + ra.source + "=>" + ra.target + " missing from second set");
    const PairResult& rb = *it->second;
    if (ra.records.size() != rb.records.size())
      throw Error(Error::Kind::Format, "compare: repetition counts differ for " + ra.source + "=>" + ra.target);
    PairComparison pc{ra.source, ra.target, {}};
    for (const auto& m : metric_names()) {
      const auto sa = ra.metric(m);
      const auto sb = rb.metric(m);
      auto stat = compare_samples(sa, sb);
      // PF is a false-alarm rate: a lower mean is the better outcome.
      if (m == "pf" && stat.verdict != Verdict::Tie)
        stat.verdict = stat.verdict == Verdict::Win ? Verdict::Lose : Verdict::Win;
      pc.per_metric[m] = stat;
      auto& t = report.totals[m];
      switch (stat.verdict) {
        case Verdict::Win: ++t.win; break;
        case Verdict::Tie: ++t.tie; break;
        case Verdict::Lose: ++t.lose; break;
      }
    }
    report.pairs.push_back(std::move(pc));
  }
  return report;
}

std::string render_comparison(const ComparisonReport& report) {
  std::ostringstream os;
  os << "source,target,metric,p_value,delta,effect,verdict\n";
  for (const auto& pc : report.pairs)
    for (const auto& [m, s] : pc.per_metric)
      os << pc.source << ',' << pc.target << ',' << m << ',' << fmt_fixed(s.p_value, 4) << ',' << fmt_fixed(s.delta, 4)
         << ',' << effect_name(s.effect) << ',' << verdict_name(s.verdict) << '\n';
  os << "\nWin/Tie/Lose\n";
  for (const auto& [m, t] : report.totals) os << m << ": " << t.win << '/' << t.tie << '/' << t.lose << '\n';
  return os.str();
}

std::vector<SweepRow> sweep(SweepParam param, std::span<const double> values, const std::vector<DefectDataset>& raw,
                            const ExperimentConfig& cfg) {
  if (values.empty()) throw Error(Error::Kind::Config, "sweep: no values given");
  std::vector<SweepRow> rows;
  for (double v : values) {
    ExperimentConfig run = cfg;
    run.repetitions = 1;
    run.train_fraction = 1.0;
    run.model_dir.clear();
    if (param == SweepParam::Lambda) run.lambda = v;
    else run.sigma = v;
    const auto results = run_experiment(raw, run);
    std::vector<double> g, mcc;
    for (const auto& r : results) {
      g.push_back(r.records.front().g_measure);
      mcc.push_back(r.records.front().mcc);
    }
    rows.push_back({v, summarize_values(g), summarize_values(mcc)});
  }
  return rows;
}

std::vector<SweepRow> sweep(SweepParam param, std::span<const double> values, const ExperimentConfig& cfg) {
  LoadOptions opts;
  opts.bug_column = cfg.bug_column;
  return sweep(param, values, load_directory(cfg.dataset_dir, opts), cfg);
}

void write_sweep_csv(std::ostream& out, SweepParam param, const std::vector<SweepRow>& rows) {
  out << (param == SweepParam::Lambda ? "lambda" : "sigma") << ",mean_g_measure,std_g_measure,mean_mcc,std_mcc\n";
  for (const auto& r : rows)
    out << fmt_exact(r.value) << ',' << fmt_exact(r.g_measure.mean) << ',' << fmt_exact(r.g_measure.std) << ','
        << fmt_exact(r.mcc.mean) << ',' << fmt_exact(r.mcc.std) << '\n';
}

}  // namespace cpdp
