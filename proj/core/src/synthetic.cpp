#include "riskpat/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <random>

#include "riskpat/error.hpp"

namespace riskpat::synthetic {

std::vector<std::size_t> top_tercile_rows(std::span<const double> column) {
  std::vector<double> sorted;
  for (const double v : column) {
    if (!is_missing(v)) sorted.push_back(v);
  }
  if (sorted.empty()) return {};
  std::sort(sorted.begin(), sorted.end());
  const double cut = sorted[2 * sorted.size() / 3];
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < column.size(); ++r) {
    if (!is_missing(column[r]) && column[r] >= cut) rows.push_back(r);
  }
  return rows;
}

double jaccard(std::vector<std::size_t> a, std::vector<std::size_t> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  const std::size_t uni = a.size() + b.size() - common.size();
  return uni ? static_cast<double>(common.size()) / static_cast<double>(uni) : 1.0;
}

PlantedData generate_planted(const PlantedOptions& options) {
  if (options.counties < 3 || options.features == 0) throw Error("synthetic: empty shape");
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t n = options.counties;
  std::vector<std::vector<double>> columns(options.features, std::vector<double>(n));
  for (auto& col : columns) {
    for (auto& v : col) v = normal(rng);
  }
  std::vector<double> target(n);
  for (auto& v : target) v = normal(rng);

  PlantedData out;
  for (const auto& cell_features : options.cells) {
    PlantedCell cell;
    cell.features = cell_features;
    for (std::size_t r = 0; r < n; ++r) cell.rows.push_back(r);
    for (const auto f : cell_features) {
      if (f >= options.features) throw Error("synthetic: cell feature out of range");
      const auto top = top_tercile_rows(columns[f]);
      std::vector<std::size_t> kept;
      std::set_intersection(cell.rows.begin(), cell.rows.end(), top.begin(), top.end(),
                            std::back_inserter(kept));
      cell.rows = std::move(kept);
    }
    out.cells.push_back(std::move(cell));
  }
  // A county in several cells is shifted once.
  std::vector<bool> shifted(n, false);
  for (const auto& cell : out.cells) {
    for (const auto r : cell.rows) shifted[r] = true;
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (shifted[r]) target[r] += options.shift;
  }
  if (options.shuffle_target) std::shuffle(target.begin(), target.end(), rng);

  std::vector<CountyKey> counties(n);
  for (std::size_t r = 0; r < n; ++r) {
    char fips[24];
    char state[24];
    std::snprintf(fips, sizeof fips, "%05zu", 10001 + r);
    std::snprintf(state, sizeof state, "S%02zu", r % 50);
    counties[r] = {fips, "County " + std::to_string(r + 1), state};
  }
  std::vector<FeatureSpec> specs(options.features);
  for (std::size_t f = 0; f < options.features; ++f) {
    char name[24];
    std::snprintf(name, sizeof name, "f%02zu", f);
    specs[f].feature_id = f;
    specs[f].name = name;
  }
  out.matrix = DataMatrix(std::move(counties), std::move(specs), std::move(columns),
                          std::move(target), "target");
  return out;
}

TargetTimeSeries generate_growth(const DataMatrix& matrix, const std::vector<std::size_t>& members,
                                 const GrowthOptions& options) {
  const std::size_t n = matrix.county_count();
  std::vector<bool> is_member(n, false);
  for (const auto r : members) is_member.at(r) = true;
  std::vector<bool> is_late(n, false);
  for (const auto r : options.late_risers) is_late.at(r) = true;

  const double f = static_cast<double>(members.size()) / static_cast<double>(n);
  if (options.factor * f >= 1.0) throw Error("synthetic: member share too large for the factor");
  const double g = options.national_increment;
  const double member_inc = options.factor * g;
  const double other_inc = g * (1.0 - options.factor * f) / (1.0 - f);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> baseline(5.0, 50.0);

  TargetTimeSeries ts;
  ts.dates = options.dates;
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> values(ts.dates.size());
    double v = baseline(rng);
    if (is_late[r]) v = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (k > 0) {
        if (is_late[r]) {
          v += k > options.late_start ? member_inc : 0.0;
        } else {
          v += is_member[r] ? member_inc : other_inc;
        }
      }
      values[k] = v;
    }
    ts.series.emplace(matrix.county(r).fips, std::move(values));
  }
  return ts;
}

}  // namespace riskpat::synthetic
