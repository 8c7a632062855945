#include "riskpat/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "riskpat/csv.hpp"
#include "riskpat/error.hpp"
#include "riskpat/hash.hpp"

namespace riskpat {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

bool same_cell(double a, double b) {
  return (is_missing(a) && is_missing(b)) || a == b;
}

std::string normalize_fips(std::string_view raw, std::size_t line) {
  const auto s = trim(raw);
  if (s.empty() || s.size() > 5 ||
      !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error("line " + std::to_string(line) + ": invalid fips '" + std::string(raw) + "'");
  }
  return std::string(5 - s.size(), '0') + std::string(s);
}

}  // namespace

std::optional<double> parse_numeric_cell(std::string_view cell, bool& missing) {
  cell = trim(cell);
  missing = cell.empty() || cell == "NA";
  if (missing) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string format_number(double v) {
  if (is_missing(v)) return "";
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

SchemaConfig SchemaConfig::from_config(const KeyValueConfig& cfg) {
  SchemaConfig s;
  s.fips_column = cfg.get_or("fips_column", s.fips_column);
  s.name_column = cfg.get_or("name_column", s.name_column);
  s.state_column = cfg.get_or("state_column", s.state_column);
  s.target_column = cfg.get_or("target_column", "");
  s.exclude_columns = cfg.get_list("exclude_columns");
  for (const auto& [key, value] : cfg.values()) {
    if (key.rfind("unit.", 0) == 0) s.units[key.substr(5)] = value;
  }
  return s;
}

DataMatrix::DataMatrix(std::vector<CountyKey> counties, std::vector<FeatureSpec> features,
                       std::vector<std::vector<double>> columns, std::vector<double> target,
                       std::string target_name)
    : counties_(std::move(counties)),
      features_(std::move(features)),
      columns_(std::move(columns)),
      target_(std::move(target)),
      target_name_(std::move(target_name)) {
  if (columns_.size() != features_.size()) throw Error("column count != feature count");
  if (target_.size() != counties_.size()) throw Error("target length != county count");
  for (const auto& col : columns_) {
    if (col.size() != counties_.size()) throw Error("column length != county count");
  }

  for (std::size_t i = 0; i < counties_.size(); ++i) {
    if (!fips_index_.emplace(counties_[i].fips, i).second) {
      throw Error("duplicate fips: " + counties_[i].fips);
    }
  }
  for (std::size_t f = 0; f < features_.size(); ++f) {
    features_[f].feature_id = f;
    if (!feature_index_.emplace(features_[f].name, f).second) {
      throw Error("duplicate feature name: " + features_[f].name);
    }
    std::set<double> distinct;
    for (const double v : columns_[f]) {
      if (!is_missing(v)) {
        distinct.insert(v);
        if (distinct.size() > 2) break;
      }
    }
    features_[f].constant = distinct.size() < 2;
    features_[f].kind = (distinct == std::set<double>{0.0, 1.0}) ? FeatureKind::binary
                                                                 : FeatureKind::numeric;
  }

  double sum = 0.0;
  binary_target_ = true;
  for (const double v : target_) {
    if (is_missing(v)) continue;
    sum += v;
    ++target_count_;
    if (v != 0.0 && v != 1.0) binary_target_ = false;
  }
  if (target_count_ == 0) binary_target_ = false;
  global_target_mean_ = target_count_ ? sum / static_cast<double>(target_count_) : kMissing;
}

std::optional<std::size_t> DataMatrix::find_county(std::string_view fips) const {
  const auto it = fips_index_.find(std::string(fips));
  if (it == fips_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> DataMatrix::find_feature(std::string_view name) const {
  const auto it = feature_index_.find(std::string(name));
  if (it == feature_index_.end()) return std::nullopt;
  return it->second;
}

bool DataMatrix::operator==(const DataMatrix& other) const {
  if (counties_ != other.counties_ || features_ != other.features_ ||
      target_name_ != other.target_name_ || target_.size() != other.target_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < target_.size(); ++i) {
    if (!same_cell(target_[i], other.target_[i])) return false;
  }
  for (std::size_t f = 0; f < columns_.size(); ++f) {
    for (std::size_t i = 0; i < columns_[f].size(); ++i) {
      if (!same_cell(columns_[f][i], other.columns_[f][i])) return false;
    }
  }
  return true;
}

DataMatrix parse_matrix(std::string_view csv_text, const SchemaConfig& schema) {
  if (schema.target_column.empty()) throw Error("schema: target_column is required");
  const auto rows = csv::parse(csv_text);
  if (rows.empty()) throw Error("matrix: empty file");
  const auto& header = rows.front();

  std::optional<std::size_t> fips_col, name_col, state_col, target_col;
  std::vector<std::size_t> feature_cols;
  const std::unordered_set<std::string> excluded(schema.exclude_columns.begin(),
                                                 schema.exclude_columns.end());
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name{trim(header[c])};
    if (name == schema.fips_column) {
      fips_col = c;
    } else if (name == schema.name_column) {
      name_col = c;
    } else if (name == schema.state_column) {
      state_col = c;
    } else if (name == schema.target_column) {
      target_col = c;
    } else if (!excluded.count(name)) {
      feature_cols.push_back(c);
    }
  }
  if (!fips_col) throw Error("matrix: fips column '" + schema.fips_column + "' not found");
  if (!target_col) throw Error("matrix: target column '" + schema.target_column + "' not found");

  std::vector<CountyKey> counties;
  std::vector<std::vector<double>> columns(feature_cols.size());
  std::vector<double> target;
  std::map<std::string, std::size_t> seen;
  std::set<std::string> duplicates;

  auto parse_cell = [&](const std::string& cell, std::size_t line, std::size_t col) {
    bool missing = false;
    const auto v = parse_numeric_cell(cell, missing);
    if (missing) return kMissing;
    if (!v) {
      throw Error("non-numeric cell at row " + std::to_string(line) + ", column '" +
                  std::string(trim(header[col])) + "': '" + cell + "'");
    }
    return *v;
  };

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() != header.size()) {
      throw Error("row " + std::to_string(line) + ": expected " + std::to_string(header.size()) +
                  " fields, got " + std::to_string(row.size()));
    }
    CountyKey key;
    key.fips = normalize_fips(row[*fips_col], line);
    if (name_col) key.name = std::string(trim(row[*name_col]));
    if (state_col) key.state = std::string(trim(row[*state_col]));
    if (!seen.emplace(key.fips, line).second) duplicates.insert(key.fips);
    counties.push_back(std::move(key));
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
      columns[j].push_back(parse_cell(row[feature_cols[j]], line, feature_cols[j]));
    }
    target.push_back(parse_cell(row[*target_col], line, *target_col));
  }

  if (!duplicates.empty()) {
    std::string msg = "duplicate fips:";
    for (const auto& d : duplicates) msg += " " + d;
    throw Error(msg);
  }
  if (std::all_of(target.begin(), target.end(), [](double v) { return is_missing(v); })) {
    throw Error("target column '" + schema.target_column + "' is entirely missing");
  }

  std::vector<FeatureSpec> features;
  for (std::size_t j = 0; j < feature_cols.size(); ++j) {
    FeatureSpec spec;
    spec.feature_id = j;
    spec.name = std::string(trim(header[feature_cols[j]]));
    if (const auto it = schema.units.find(spec.name); it != schema.units.end()) {
      spec.units = it->second;
    }
    features.push_back(std::move(spec));
  }
  return DataMatrix(std::move(counties), std::move(features), std::move(columns),
                    std::move(target), schema.target_column);
}

DataMatrix load_matrix(const std::filesystem::path& path, const SchemaConfig& schema) {
  if (!std::filesystem::exists(path)) throw Error("matrix file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str(), schema);
}

std::string to_canonical_csv(const DataMatrix& m) {
  std::string out;
  csv::Row header{"fips", "name", "state"};
  for (const auto& f : m.features()) header.push_back(f.name);
  header.push_back(m.target_name());
  out += csv::format_row(header) + "\n";
  for (std::size_t i = 0; i < m.county_count(); ++i) {
    csv::Row row{m.county(i).fips, m.county(i).name, m.county(i).state};
    for (std::size_t f = 0; f < m.feature_count(); ++f) row.push_back(format_number(m.value(i, f)));
    row.push_back(format_number(m.target()[i]));
    out += csv::format_row(row) + "\n";
  }
  return out;
}

SchemaConfig canonical_schema(const DataMatrix& m) {
  SchemaConfig s;
  s.target_column = m.target_name();
  for (const auto& f : m.features()) {
    if (!f.units.empty()) s.units[f.name] = f.units;
  }
  return s;
}

std::string dataset_fingerprint(const DataMatrix& m) { return sha256_hex(to_canonical_csv(m)); }

Date parse_date(std::string_view text) {
  text = trim(text);
  int y = 0;
  unsigned mo = 0, d = 0;
  auto digits = [&](std::size_t pos, std::size_t len, auto& out) {
    const auto* first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, out);
    return ec == std::errc{} && ptr == first + len;
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !digits(0, 4, y) ||
      !digits(5, 2, mo) || !digits(8, 2, d)) {
    throw Error("unparseable date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  const Date date{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
  if (!date.ok()) throw Error("invalid calendar date '" + std::string(text) + "'");
  return date;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

const std::vector<double>* TargetTimeSeries::find(const std::string& fips) const {
  const auto it = series.find(fips);
  return it == series.end() ? nullptr : &it->second;
}

std::optional<std::size_t> TargetTimeSeries::snap_index(Date d) const {
  const auto it = std::upper_bound(dates.begin(), dates.end(), d);
  if (it == dates.begin()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(dates.begin(), it) - 1);
}

TimeSeriesLoad parse_timeseries(std::string_view csv_text, const DataMatrix* matrix) {
  const auto rows = csv::parse(csv_text);
  if (rows.empty() || rows.front().size() < 2) throw Error("no date columns");

  TimeSeriesLoad out;
  const auto& header = rows.front();
  for (std::size_t c = 1; c < header.size(); ++c) {
    const Date d = parse_date(header[c]);
    if (!out.series.dates.empty() && !(out.series.dates.back() < d)) {
      throw Error("time series dates must be strictly increasing");
    }
    out.series.dates.push_back(d);
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t line = r + 1;
    if (row.size() != header.size()) {
      throw Error("time series row " + std::to_string(line) + ": wrong field count");
    }
    const std::string fips = normalize_fips(row[0], line);
    if (out.series.series.count(fips)) throw Error("duplicate fips: " + fips);

    std::vector<double> values;
    values.reserve(row.size() - 1);
    double running = 0.0;
    std::size_t clamps = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      bool missing = false;
      const auto v = parse_numeric_cell(row[c], missing);
      if (missing) {
        values.push_back(running);
        continue;
      }
      if (!v) {
        throw Error("non-numeric cell at row " + std::to_string(line) + ", column '" + header[c] +
                    "': '" + row[c] + "'");
      }
      if (!values.empty() && *v < running) {
        ++clamps;
        values.push_back(running);
      } else {
        running = *v;
        values.push_back(*v);
      }
    }
    out.clamp_counts[fips] = clamps;
    if (matrix && !matrix->find_county(fips)) out.unmatched_fips.push_back(fips);
    out.series.series.emplace(fips, std::move(values));
  }
  return out;
}

TimeSeriesLoad load_timeseries(const std::filesystem::path& path, const DataMatrix* matrix) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_timeseries(buf.str(), matrix);
}

std::optional<ValueRange> GlobalStats::state_range(const std::string& state,
                                                   std::size_t feature) const {
  const auto it = state_ranges.find(state);
  if (it == state_ranges.end() || feature >= it->second.size()) return std::nullopt;
  return it->second[feature];
}

GlobalStats global_stats(const DataMatrix& m) {
  GlobalStats gs;
  gs.global_target_mean = m.global_target_mean();
  gs.features.resize(m.feature_count());

  auto widen = [](std::optional<ValueRange>& r, double v) {
    if (!r) {
      r = ValueRange{v, v};
    } else {
      r->lo = std::min(r->lo, v);
      r->hi = std::max(r->hi, v);
    }
  };

  for (std::size_t f = 0; f < m.feature_count(); ++f) {
    auto& summary = gs.features[f];
    double sum = 0.0;
    for (std::size_t i = 0; i < m.county_count(); ++i) {
      const double v = m.value(i, f);
      if (is_missing(v)) continue;
      widen(summary.range, v);
      sum += v;
      ++summary.count;
      auto& per_state = gs.state_ranges[m.county(i).state];
      per_state.resize(m.feature_count());
      widen(per_state[f], v);
    }
    if (summary.count) summary.mean = sum / static_cast<double>(summary.count);
  }
  return gs;
}

}  // namespace riskpat
