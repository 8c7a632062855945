#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace riskpat {

using Item = std::uint32_t;
using Transaction = std::vector<Item>;

struct FrequentItemset {
  std::vector<Item> items;  // strictly increasing
  std::size_t support = 0;

  auto operator<=>(const FrequentItemset&) const = default;
};

struct FpGrowthOptions {
  std::size_t min_support = 1;
  int max_depth = 3;
  // item -> group; two items of one group never appear in the same itemset.
  // Empty means every item is its own group.
  std::span<const std::size_t> item_groups;
};

struct FpGrowthResult {
  // Sorted by size, then lexicographically by items.
  std::vector<FrequentItemset> itemsets;
  // Passes over the input transactions: one to count items, one to build
  // the tree. Conditional trees are built from the tree, not the input.
  std::size_t database_scans = 0;
};

// All itemsets of size <= max_depth (1..3) with support >= min_support.
FpGrowthResult fp_growth(std::span<const Transaction> transactions, const FpGrowthOptions& options);

}  // namespace riskpat
