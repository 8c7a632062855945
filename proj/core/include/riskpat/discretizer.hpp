#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "riskpat/county_set.hpp"
#include "riskpat/dataset.hpp"

namespace riskpat {

// Equal-frequency base bins of one feature. `cuts` are the lower edges of
// bins 1..k-1; a value v falls in bin (number of cuts <= v).
struct FeatureBins {
  std::size_t feature_id = 0;
  std::vector<double> cuts;
  // Zero for features excluded from mining (constant or all missing).
  std::size_t bin_count = 0;

  std::size_t bin_of(double v) const;
};

struct Binning {
  std::vector<FeatureBins> features;  // indexed by feature_id
  std::vector<std::string> warnings;
};

// Quantile edges over the non-missing values of every feature. Binary
// features always get the two bins {0} and {1}. Cuts that coincide are
// collapsed, so heavily tied features receive fewer bins.
Binning build_base_bins(const DataMatrix& matrix, int bins_per_feature);

// A closed interval on one feature covering the contiguous base-bin run
// [lo_bin, hi_bin]. lo/hi are the observed min/max of member values.
struct Interval {
  std::size_t feature_id = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t lo_bin = 0;
  std::size_t hi_bin = 0;

  bool operator==(const Interval&) const = default;
};

class ItemUniverse {
 public:
  const std::vector<Interval>& items() const { return items_; }
  const Interval& item(std::size_t id) const { return items_[id]; }
  std::size_t item_count() const { return items_.size(); }

  // Per county row: ascending item ids it holds.
  const std::vector<std::vector<std::uint32_t>>& transactions() const { return transactions_; }
  // Counties holding the item (non-missing value inside the interval).
  const CountySet& members(std::size_t item) const { return members_[item]; }
  // item id -> feature id, for excluding same-feature itemsets.
  const std::vector<std::size_t>& item_features() const { return item_features_; }

  // Canonical text form; identical input and config give identical bytes.
  std::string serialize() const;

 private:
  friend ItemUniverse build_item_universe(const DataMatrix&, const Binning&, int);

  std::vector<Interval> items_;
  std::vector<std::vector<std::uint32_t>> transactions_;
  std::vector<CountySet> members_;
  std::vector<std::size_t> item_features_;
};

// Items per feature: every base bin, then every contiguous run of 2..max_merge_run
// bins (by run length, then start) except a run covering the whole feature.
ItemUniverse build_item_universe(const DataMatrix& matrix, const Binning& bins, int max_merge_run);

}  // namespace riskpat
