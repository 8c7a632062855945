#include "riskpat/discretizer.hpp"

#include <algorithm>
#include <sstream>

#include "riskpat/error.hpp"

namespace riskpat {

std::size_t FeatureBins::bin_of(double v) const {
  return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

Binning build_base_bins(const DataMatrix& matrix, int bins_per_feature) {
  if (bins_per_feature < 2) throw Error("bins_per_feature must be at least 2");
  const auto bins = static_cast<std::size_t>(bins_per_feature);

  Binning out;
  out.features.resize(matrix.feature_count());
  for (std::size_t f = 0; f < matrix.feature_count(); ++f) {
    const auto& spec = matrix.feature(f);
    auto& fb = out.features[f];
    fb.feature_id = f;
    if (spec.constant) {
      out.warnings.push_back("feature '" + spec.name + "' is constant; excluded from mining");
      continue;
    }
    if (spec.kind == FeatureKind::binary) {
      fb.cuts = {1.0};
      fb.bin_count = 2;
      continue;
    }

    std::vector<double> values;
    values.reserve(matrix.county_count());
    for (const double v : matrix.column(f)) {
      if (!is_missing(v)) values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();

    for (std::size_t k = 1; k < bins; ++k) {
      const double cut = values[k * n / bins];
      // A cut at the minimum would leave bin 0 empty; equal cuts collapse.
      if (cut > values.front() && (fb.cuts.empty() || cut > fb.cuts.back())) fb.cuts.push_back(cut);
    }
    if (fb.cuts.empty()) {
      // Mass piled on one value: split just above the median, or isolate
      // the maximum when the median is the maximum.
      const auto above = std::upper_bound(values.begin(), values.end(), values[n / 2]);
      fb.cuts.push_back(above != values.end() ? *above : values.back());
    }
    fb.bin_count = fb.cuts.size() + 1;
  }
  return out;
}

ItemUniverse build_item_universe(const DataMatrix& matrix, const Binning& bins, int max_merge_run) {
  if (max_merge_run < 1) throw Error("max_merge_run must be at least 1");
  if (bins.features.size() != matrix.feature_count()) {
    throw Error("binning does not match the matrix");
  }
  const std::size_t rows = matrix.county_count();

  ItemUniverse u;
  for (std::size_t f = 0; f < matrix.feature_count(); ++f) {
    const auto& fb = bins.features[f];
    if (fb.bin_count < 2) continue;

    const auto column = matrix.column(f);
    std::vector<std::size_t> bin_of_row(rows, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!is_missing(column[r])) bin_of_row[r] = fb.bin_of(column[r]);
    }

    const std::size_t max_len =
        std::min(fb.bin_count, static_cast<std::size_t>(max_merge_run));
    for (std::size_t len = 1; len <= max_len; ++len) {
      if (len == fb.bin_count) break;  // whole range constrains nothing
      for (std::size_t start = 0; start + len <= fb.bin_count; ++start) {
        const std::size_t end = start + len - 1;
        CountySet members(rows);
        Interval iv{f, 0.0, 0.0, start, end};
        bool any = false;
        for (std::size_t r = 0; r < rows; ++r) {
          if (is_missing(column[r]) || bin_of_row[r] < start || bin_of_row[r] > end) continue;
          members.insert(r);
          iv.lo = any ? std::min(iv.lo, column[r]) : column[r];
          iv.hi = any ? std::max(iv.hi, column[r]) : column[r];
          any = true;
        }
        if (!any) continue;
        u.items_.push_back(iv);
        u.members_.push_back(std::move(members));
        u.item_features_.push_back(f);
      }
    }
  }

  u.transactions_.assign(rows, {});
  for (std::size_t id = 0; id < u.items_.size(); ++id) {
    u.members_[id].for_each(
        [&](std::size_t r) { u.transactions_[r].push_back(static_cast<std::uint32_t>(id)); });
  }
  return u;
}

std::string ItemUniverse::serialize() const {
  std::ostringstream out;
  out << "items " << items_.size() << "\n";
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& iv = items_[i];
    out << i << ' ' << iv.feature_id << ' ' << iv.lo_bin << ' ' << iv.hi_bin << ' '
        << format_number(iv.lo) << ' ' << format_number(iv.hi) << ' ' << members_[i].count()
        << "\n";
  }
  out << "transactions " << transactions_.size() << "\n";
  for (const auto& t : transactions_) {
    for (std::size_t k = 0; k < t.size(); ++k) out << (k ? " " : "") << t[k];
    out << "\n";
  }
  return out.str();
}

}  // namespace riskpat
