#pragma once

// Brute-force reference implementations used by the unit and acceptance
// tests. They are deliberately naive and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "riskpat/fpgrowth.hpp"

namespace riskpat::oracle {

// Every itemset of size 1..max_depth whose items lie in distinct groups,
// with support >= min_support. Sorted by size, then lexicographically.
inline std::vector<FrequentItemset> enumerate_itemsets(const std::vector<Transaction>& transactions,
                                                       std::size_t min_support, int max_depth,
                                                       const std::vector<std::size_t>& groups = {}) {
  std::set<Item> universe;
  std::vector<std::set<Item>> sets;
  for (const auto& t : transactions) {
    sets.emplace_back(t.begin(), t.end());
    universe.insert(t.begin(), t.end());
  }
  const std::vector<Item> items(universe.begin(), universe.end());
  auto group = [&](Item i) { return groups.empty() ? static_cast<std::size_t>(i) : groups[i]; };

  std::vector<FrequentItemset> out;
  std::vector<Item> current;
  auto visit = [&](auto&& self, std::size_t start) -> void {
    if (!current.empty()) {
      std::size_t support = 0;
      for (const auto& s : sets) {
        if (std::all_of(current.begin(), current.end(), [&](Item i) { return s.count(i) > 0; })) {
          ++support;
        }
      }
      if (support >= min_support) out.push_back({current, support});
    }
    if (static_cast<int>(current.size()) == max_depth) return;
    for (std::size_t k = start; k < items.size(); ++k) {
      const bool clash = std::any_of(current.begin(), current.end(),
                                     [&](Item c) { return group(c) == group(items[k]); });
      if (clash) continue;
      current.push_back(items[k]);
      self(self, k + 1);
      current.pop_back();
    }
  };
  visit(visit, 0);
  std::sort(out.begin(), out.end(), [](const FrequentItemset& a, const FrequentItemset& b) {
    if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
    return a.items < b.items;
  });
  return out;
}

// U statistic by direct pair counting: inside > outside counts 1, ties 1/2.
inline double pairwise_u(const std::vector<double>& inside, const std::vector<double>& outside) {
  double u = 0.0;
  for (const double a : inside) {
    for (const double b : outside) u += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
  }
  return u;
}

// Exact one-sided p for tie-free samples: ranks are 1..N, so enumerate every
// n-subset of ranks and compare its rank sum with the observed one.
inline double rank_split_p(const std::vector<double>& inside, const std::vector<double>& outside,
                           bool greater = true) {
  std::vector<double> pooled(inside);
  pooled.insert(pooled.end(), outside.begin(), outside.end());
  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  long observed = 0;
  for (const double v : inside) {
    observed += static_cast<long>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin()) + 1;
  }
  const std::size_t total = pooled.size();
  std::vector<int> pick(total, 0);
  std::fill(pick.end() - static_cast<long>(inside.size()), pick.end(), 1);
  long hits = 0;
  long count = 0;
  do {
    long sum = 0;
    for (std::size_t r = 0; r < total; ++r) {
      if (pick[r]) sum += static_cast<long>(r) + 1;
    }
    ++count;
    if (greater ? sum >= observed : sum <= observed) ++hits;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return static_cast<double>(hits) / static_cast<double>(count);
}

// Exact one-sided p for any samples: relabel the pooled values in every
// possible way and recompute U by pair counting.
inline double permutation_p(const std::vector<double>& inside, const std::vector<double>& outside,
                            bool greater = true) {
  std::vector<double> pooled(inside);
  pooled.insert(pooled.end(), outside.begin(), outside.end());
  const double observed = pairwise_u(inside, outside);
  std::vector<int> label(pooled.size(), 0);
  std::fill(label.end() - static_cast<long>(inside.size()), label.end(), 1);
  long hits = 0;
  long count = 0;
  do {
    std::vector<double> in;
    std::vector<double> out;
    for (std::size_t i = 0; i < pooled.size(); ++i) (label[i] ? in : out).push_back(pooled[i]);
    const double u = pairwise_u(in, out);
    ++count;
    if (greater ? u >= observed - 1e-12 : u <= observed + 1e-12) ++hits;
  } while (std::next_permutation(label.begin(), label.end()));
  return static_cast<double>(hits) / static_cast<double>(count);
}

// Pearson statistic of a 2x2 table via N(ad - bc)^2 / (r1 r2 c1 c2).
inline double chi_square_2x2(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double diff = a * d - b * c;
  return n * diff * diff / ((a + b) * (c + d) * (a + c) * (b + d));
}

// Upper tail of chi-square with one degree of freedom: 2 Phi(-sqrt(x)).
inline double chi_square_sf_df1(double x) { return std::erfc(std::sqrt(x) / std::sqrt(2.0)); }

}  // namespace riskpat::oracle
