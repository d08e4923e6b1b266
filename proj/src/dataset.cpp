#include "cpdp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace cpdp {
namespace {

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

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

bool is_missing_token(const std::string& s) {
  if (s.empty() || s == "?") return true;
  const auto l = lower(s);
  return l == "na" || l == "nan";
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

// Column names PROMISE exports use for identifiers; these stay non-metric even
// when their values look numeric (e.g. version "1.7").
bool is_identifier_name(const std::string& header) {
  static const std::set<std::string> names = {"name",   "name.1", "version", "project", "file",
                                               "filename", "class", "module", "id"};
  return names.contains(lower(header));
}

}  // namespace

std::size_t DefectDataset::count_label(int label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

Matrix DefectDataset::rows_with_label(int label) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) idx.push_back(i);
  Matrix out = rows.select_rows(idx);
  if (idx.empty()) out = Matrix(0, rows.cols());
  return out;
}

DefectDataset parse_promise_csv(std::istream& in, const std::string& name, const LoadOptions& opts) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Error::Kind::EmptyInput, name + ": missing header row");
  const auto header = split_csv_line(line);

  std::vector<std::vector<std::string>> cells;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw Error(Error::Kind::Parse, name + ": row " + std::to_string(cells.size() + 1) + " has " +
                                          std::to_string(fields.size()) + " fields, header has " +
                                          std::to_string(header.size()));
    cells.push_back(std::move(fields));
  }
  if (cells.empty()) throw Error(Error::Kind::EmptyInput, name + ": no data rows");

  const auto bug_it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
    return lower(h) == lower(opts.bug_column);
  });
  if (bug_it == header.end())
    throw Error(Error::Kind::Format, name + ": defect column '" + opts.bug_column + "' not found");
  const auto bug_col = static_cast<std::size_t>(bug_it - header.begin());

  auto column_is_numeric = [&](std::size_t c) {
    return std::all_of(cells.begin(), cells.end(), [&](const auto& row) {
      return is_missing_token(row[c]) || parse_number(row[c]).has_value();
    });
  };

  DefectDataset ds;
  ds.name = name;
  std::vector<std::size_t> metric_cols;
  bool leading = true;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == bug_col) continue;
    if (leading && (is_identifier_name(header[c]) || !column_is_numeric(c))) {
      ds.skipped_columns.push_back(header[c]);
      continue;
    }
    leading = false;
    metric_cols.push_back(c);
    ds.feature_names.push_back(header[c]);
  }
  if (metric_cols.empty()) throw Error(Error::Kind::Format, name + ": no numeric metric columns");

  ds.rows = Matrix(cells.size(), metric_cols.size());
  ds.labels.resize(cells.size());
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t j = 0; j < metric_cols.size(); ++j) {
      const auto& cell = cells[r][metric_cols[j]];
      if (is_missing_token(cell)) {
        ds.rows(r, j) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const auto v = parse_number(cell);
      if (!v)
        throw Error(Error::Kind::Parse, name + ": non-numeric value '" + cell + "' at row " +
                                            std::to_string(r + 1) + ", column '" +
                                            header[metric_cols[j]] + "'");
      ds.rows(r, j) = *v;
    }
    const auto bug = parse_number(cells[r][bug_col]);
    if (!bug || !std::isfinite(*bug) || *bug < 0)
      throw Error(Error::Kind::Parse, name + ": invalid defect count '" + cells[r][bug_col] +
                                          "' at row " + std::to_string(r + 1));
    ds.labels[r] = *bug > 0 ? 1 : 0;
  }
  return ds;
}

DefectDataset load_promise_csv(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::Format, "cannot open " + path.string());
  auto ds = parse_promise_csv(in, path.stem().string(), opts);
  ds.source_path = path.string();
  return ds;
}

std::vector<DefectDataset> load_directory(const std::filesystem::path& dir, const LoadOptions& opts) {
  if (!std::filesystem::is_directory(dir))
    throw Error(Error::Kind::Format, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && lower(entry.path().extension().string()) == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<DefectDataset> out;
  for (const auto& f : files) out.push_back(load_promise_csv(f, opts));
  return out;
}

DefectDataset clean(const DefectDataset& ds) {
  std::vector<std::size_t> keep;
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto row = ds.rows.row(i);
    if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) continue;
    std::vector<double> key(row.begin(), row.end());
    key.push_back(ds.labels[i]);
    if (!seen.insert(std::move(key)).second) continue;
    keep.push_back(i);
  }
  if (keep.empty()) throw Error(Error::Kind::EmptyInput, ds.name + ": no rows left after cleaning");

  DefectDataset out = ds;
  out.rows = ds.rows.select_rows(keep);
  out.labels.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) out.labels[i] = ds.labels[keep[i]];
  return out;
}

DefectDataset log_transform(const DefectDataset& ds) {
  DefectDataset out = ds;
  for (std::size_t i = 0; i < out.rows.rows(); ++i) {
    for (auto& v : out.rows.row(i)) {
      if (v < 0)
        throw Error(Error::Kind::Domain,
                    ds.name + ": negative value at row " + std::to_string(i + 1) + " cannot be log-transformed");
      v = std::log1p(v);
    }
  }
  return out;
}

DatasetStats summarize(const DefectDataset& ds) {
  DatasetStats s;
  s.name = ds.name;
  s.n_metrics = ds.num_features();
  s.n_instances = ds.size();
  s.n_defective = ds.count_label(1);
  s.defective_rate =
      s.n_instances == 0 ? 0.0 : static_cast<double>(s.n_defective) / static_cast<double>(s.n_instances);
  return s;
}

}  // namespace cpdp
