#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "riskpat/config.hpp"

namespace riskpat {

// Missing cells are stored as quiet NaN and never imputed.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

// Strict numeric cell parsing: decimal point, optional exponent. Empty and
// "NA" are missing. Anything else (including "nan"/"inf") is rejected.
std::optional<double> parse_numeric_cell(std::string_view cell, bool& missing);

// Shortest round-trip decimal representation ("37.6", "0", "1e-07").
std::string format_number(double v);

enum class FeatureKind { numeric, binary };

struct FeatureSpec {
  std::size_t feature_id = 0;
  std::string name;
  std::string units;
  FeatureKind kind = FeatureKind::numeric;
  // Fewer than two distinct non-missing values; excluded from mining.
  bool constant = false;

  bool operator==(const FeatureSpec&) const = default;
};

struct CountyKey {
  std::string fips;  // 5-digit, zero padded
  std::string name;
  std::string state;

  bool operator==(const CountyKey&) const = default;
};

struct SchemaConfig {
  std::string fips_column = "fips";
  std::string name_column = "name";
  std::string state_column = "state";
  std::string target_column;
  std::vector<std::string> exclude_columns;
  // feature name -> units, from `unit.<feature> = ...` keys.
  std::map<std::string, std::string> units;

  static SchemaConfig from_config(const KeyValueConfig& cfg);
};

// Counties x features, stored column-major, plus one target column.
class DataMatrix {
 public:
  DataMatrix() = default;
  DataMatrix(std::vector<CountyKey> counties, std::vector<FeatureSpec> features,
             std::vector<std::vector<double>> columns, std::vector<double> target,
             std::string target_name);

  std::size_t county_count() const { return counties_.size(); }
  std::size_t feature_count() const { return features_.size(); }

  const std::vector<CountyKey>& counties() const { return counties_; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const CountyKey& county(std::size_t row) const { return counties_.at(row); }
  const FeatureSpec& feature(std::size_t col) const { return features_.at(col); }

  double value(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  std::span<const double> column(std::size_t col) const { return columns_.at(col); }
  std::span<const double> target() const { return target_; }
  const std::string& target_name() const { return target_name_; }

  // Mean over non-missing target entries.
  double global_target_mean() const { return global_target_mean_; }
  std::size_t target_count() const { return target_count_; }
  // True when every non-missing target is 0 or 1.
  bool binary_target() const { return binary_target_; }

  std::optional<std::size_t> find_county(std::string_view fips) const;
  std::optional<std::size_t> find_feature(std::string_view name) const;

  // Cell-exact comparison; missing compares equal to missing.
  bool operator==(const DataMatrix& other) const;

 private:
  std::vector<CountyKey> counties_;
  std::vector<FeatureSpec> features_;
  std::vector<std::vector<double>> columns_;
  std::vector<double> target_;
  std::string target_name_;
  double global_target_mean_ = kMissing;
  std::size_t target_count_ = 0;
  bool binary_target_ = false;
  std::unordered_map<std::string, std::size_t> fips_index_;
  std::unordered_map<std::string, std::size_t> feature_index_;
};

DataMatrix parse_matrix(std::string_view csv_text, const SchemaConfig& schema);
DataMatrix load_matrix(const std::filesystem::path& path, const SchemaConfig& schema);

// Canonical form: header `fips,name,state,<features...>,<target_name>`,
// shortest round-trip numbers, empty cells for missing values.
std::string to_canonical_csv(const DataMatrix& matrix);
SchemaConfig canonical_schema(const DataMatrix& matrix);
// SHA-256 of the canonical CSV.
std::string dataset_fingerprint(const DataMatrix& matrix);

using Date = std::chrono::year_month_day;

Date parse_date(std::string_view text);
std::string format_date(Date d);

struct TargetTimeSeries {
  std::vector<Date> dates;
  // fips -> cumulative values aligned to `dates`.
  std::map<std::string, std::vector<double>> series;

  const std::vector<double>* find(const std::string& fips) const;
  // Index of the last date <= d, if any.
  std::optional<std::size_t> snap_index(Date d) const;
};

struct TimeSeriesLoad {
  TargetTimeSeries series;
  // Per-county number of entries raised to the running maximum.
  std::map<std::string, std::size_t> clamp_counts;
  // Series fips not present in the matrix (kept, but flagged).
  std::vector<std::string> unmatched_fips;
};

// Wide CSV `fips,YYYY-MM-DD,...`. Decreasing entries are clamped to the
// running maximum; empty cells carry the running maximum forward.
TimeSeriesLoad parse_timeseries(std::string_view csv_text, const DataMatrix* matrix = nullptr);
TimeSeriesLoad load_timeseries(const std::filesystem::path& path,
                               const DataMatrix* matrix = nullptr);

struct ValueRange {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return lo <= v && v <= hi; }
  bool operator==(const ValueRange&) const = default;
};

struct FeatureSummary {
  std::optional<ValueRange> range;  // empty when the column is all missing
  double mean = kMissing;
  std::size_t count = 0;
};

struct GlobalStats {
  std::vector<FeatureSummary> features;
  // state code -> per-feature range over that state's counties
  std::map<std::string, std::vector<std::optional<ValueRange>>> state_ranges;
  double global_target_mean = kMissing;

  std::optional<ValueRange> state_range(const std::string& state, std::size_t feature) const;
};

GlobalStats global_stats(const DataMatrix& matrix);

}  // namespace riskpat
