#include <gtest/gtest.h>

#include <random>

#include "builders.hpp"
#include "riskpat/discretizer.hpp"
#include "riskpat/error.hpp"

using namespace riskpat;
using riskpat::testing::make_matrix;

namespace {

std::vector<double> iota_column(int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = i + 1;
  return v;
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

std::size_t bin_count_of(const FeatureBins& fb, std::span<const double> column, std::size_t bin) {
  std::size_t c = 0;
  for (const double v : column) {
    if (!is_missing(v) && fb.bin_of(v) == bin) ++c;
  }
  return c;
}

}  // namespace

TEST(BaseBins, DistinctValuesSplitIntoEqualThirds) {
  auto col = iota_column(300);
  std::shuffle(col.begin(), col.end(), std::mt19937_64(1));
  const auto m = make_matrix({col}, ones(300));
  const auto bins = build_base_bins(m, 3);
  const auto& fb = bins.features[0];
  ASSERT_EQ(fb.bin_count, 3u);
  EXPECT_EQ(fb.cuts, (std::vector<double>{101, 201}));
  for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(bin_count_of(fb, m.column(0), b), 100u);
}

TEST(BaseBins, BinaryFeatureAlwaysTwoBins) {
  std::vector<double> col(50);
  for (std::size_t i = 0; i < col.size(); ++i) col[i] = i % 3 == 0 ? 1.0 : 0.0;
  const auto m = make_matrix({col}, ones(50));
  for (int k : {2, 3, 7}) {
    const auto fb = build_base_bins(m, k).features[0];
    EXPECT_EQ(fb.bin_count, 2u);
    EXPECT_EQ(fb.bin_of(0.0), 0u);
    EXPECT_EQ(fb.bin_of(1.0), 1u);
  }
}

TEST(BaseBins, HeavilyTiedValuesCollapseEdges) {
  std::vector<double> col(300, 0.0);
  std::fill(col.begin() + 200, col.end(), 5.0);
  const auto m = make_matrix({col}, ones(300));
  const auto fb = build_base_bins(m, 3).features[0];
  EXPECT_EQ(fb.bin_count, 2u);
  EXPECT_EQ(bin_count_of(fb, m.column(0), 0), 200u);
  EXPECT_EQ(bin_count_of(fb, m.column(0), 1), 100u);
}

TEST(BaseBins, ConstantFeatureExcludedWithWarning) {
  const auto m = make_matrix({std::vector<double>(10, 4.0), iota_column(10)}, ones(10));
  const auto bins = build_base_bins(m, 3);
  EXPECT_EQ(bins.features[0].bin_count, 0u);
  ASSERT_EQ(bins.warnings.size(), 1u);
  EXPECT_NE(bins.warnings[0].find("x0"), std::string::npos);
  const auto u = build_item_universe(m, bins, 2);
  for (const auto f : u.item_features()) EXPECT_EQ(f, 1u);
}

TEST(BaseBins, RejectsTooFewBins) {
  const auto m = make_matrix({iota_column(10)}, ones(10));
  EXPECT_THROW(build_base_bins(m, 1), Error);
}

TEST(ItemUniverse, ThreeBinsGiveFiveItems) {
  const auto m = make_matrix({iota_column(9)}, ones(9));
  const auto u = build_item_universe(m, build_base_bins(m, 3), 2);
  ASSERT_EQ(u.item_count(), 5u);
  const std::vector<std::pair<std::size_t, std::size_t>> runs{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(u.item(i).lo_bin, runs[i].first);
    EXPECT_EQ(u.item(i).hi_bin, runs[i].second);
  }
  EXPECT_EQ(u.item(3).lo, 1.0);
  EXPECT_EQ(u.item(3).hi, 6.0);
  EXPECT_EQ(u.item(4).lo, 4.0);
  EXPECT_EQ(u.item(4).hi, 9.0);
}

TEST(ItemUniverse, TwoBinsHaveNoMerge) {
  const auto m = make_matrix({iota_column(10)}, ones(10));
  const auto u = build_item_universe(m, build_base_bins(m, 2), 2);
  EXPECT_EQ(u.item_count(), 2u);
}

TEST(ItemUniverse, MissingValueHoldsNoItemOfFeature) {
  auto a = iota_column(9);
  a[4] = kMissing;
  const auto m = make_matrix({a, iota_column(9)}, ones(9));
  const auto u = build_item_universe(m, build_base_bins(m, 3), 2);
  for (const auto item : u.transactions()[4]) EXPECT_EQ(u.item_features()[item], 1u);
  EXPECT_FALSE(u.transactions()[4].empty());
}

TEST(ItemUniverse, PartitionUnionAndBoundsProperties) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> small(0, 6);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 40 + rep * 7;
    std::vector<std::vector<double>> cols(4, std::vector<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
      cols[0][r] = normal(rng);
      cols[1][r] = small(rng);                        // tied
      cols[2][r] = r % 9 == 0 ? kMissing : normal(rng);  // gaps
      cols[3][r] = r % 4 == 0 ? 1.0 : 0.0;              // binary
    }
    const auto m = make_matrix(cols, ones(n));
    const int k = 2 + rep % 4;
    const int merge = 1 + rep % 3;
    const auto bins = build_base_bins(m, k);
    const auto u = build_item_universe(m, bins, merge);

    for (std::size_t f = 0; f < 4; ++f) {
      const auto& fb = bins.features[f];
      std::size_t present = 0;
      for (const double v : m.column(f)) present += is_missing(v) ? 0 : 1;
      std::size_t total = 0;
      for (std::size_t b = 0; b < fb.bin_count; ++b) {
        const auto c = bin_count_of(fb, m.column(f), b);
        EXPECT_GT(c, 0u);
        total += c;
      }
      EXPECT_EQ(total, present);
    }

    for (std::size_t i = 0; i < u.item_count(); ++i) {
      const auto& iv = u.item(i);
      const auto& fb = bins.features[iv.feature_id];
      EXPECT_LE(iv.lo, iv.hi);
      EXPECT_LE(iv.hi_bin - iv.lo_bin + 1, static_cast<std::size_t>(merge));
      EXPECT_LT(iv.hi_bin - iv.lo_bin + 1, fb.bin_count);
      const auto col = m.column(iv.feature_id);
      double lo = 0, hi = 0;
      bool any = false;
      for (std::size_t r = 0; r < n; ++r) {
        const double v = col[r];
        const bool in_run = !is_missing(v) && fb.bin_of(v) >= iv.lo_bin && fb.bin_of(v) <= iv.hi_bin;
        EXPECT_EQ(u.members(i).contains(r), in_run);
        // Raw-value containment agrees with bin membership.
        EXPECT_EQ(!is_missing(v) && iv.lo <= v && v <= iv.hi, in_run);
        if (in_run) {
          lo = any ? std::min(lo, v) : v;
          hi = any ? std::max(hi, v) : v;
          any = true;
        }
      }
      EXPECT_EQ(iv.lo, lo);
      EXPECT_EQ(iv.hi, hi);
    }
  }
}

TEST(ItemUniverse, SerializationIsDeterministic) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> cols(3, std::vector<double>(100));
  for (auto& c : cols) {
    for (auto& v : c) v = normal(rng);
  }
  const auto m1 = make_matrix(cols, ones(100));
  const auto m2 = make_matrix(cols, ones(100));
  const auto a = build_item_universe(m1, build_base_bins(m1, 3), 2).serialize();
  const auto b = build_item_universe(m2, build_base_bins(m2, 3), 2).serialize();
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a.empty());
}
