#include "riskpat/fpgrowth.hpp"

#include <algorithm>
#include <numeric>

#include "riskpat/error.hpp"

namespace riskpat {
namespace {

constexpr std::int32_t kNone = -1;

// Conditional pattern base: weighted item paths stored back to back.
struct PatternBase {
  std::vector<Item> items;
  std::vector<std::size_t> ends;  // path k is items[ends[k-1], ends[k])
  std::vector<std::size_t> counts;

  std::size_t size() const { return counts.size(); }
  std::span<const Item> path(std::size_t k) const {
    const std::size_t begin = k ? ends[k - 1] : 0;
    return {items.data() + begin, ends[k] - begin};
  }
};

class FpTree {
 public:
  // `item_counts` holds the support of every candidate item; only those
  // reaching min_support enter the tree, ordered by descending support.
  FpTree(const std::vector<std::pair<Item, std::size_t>>& item_counts, std::size_t min_support) {
    for (const auto& [item, count] : item_counts) {
      if (count >= min_support) ranked_.push_back({item, count, kNone});
    }
    std::sort(ranked_.begin(), ranked_.end(), [](const Header& a, const Header& b) {
      return a.support != b.support ? a.support > b.support : a.item < b.item;
    });
    for (std::size_t r = 0; r < ranked_.size(); ++r) rank_of_.push_back({ranked_[r].item, r});
    std::sort(rank_of_.begin(), rank_of_.end());
    nodes_.push_back(Node{});  // root
  }

  bool empty() const { return ranked_.empty(); }
  std::size_t rank_count() const { return ranked_.size(); }
  Item item_at(std::size_t rank) const { return ranked_[rank].item; }
  std::size_t support_at(std::size_t rank) const { return ranked_[rank].support; }

  // Inserts the frequent items of `items` (any order) with weight `count`.
  void insert(std::span<const Item> items, std::size_t count, std::vector<std::size_t>& scratch) {
    scratch.clear();
    for (const Item item : items) {
      const auto it = std::lower_bound(rank_of_.begin(), rank_of_.end(),
                                       std::pair<Item, std::size_t>{item, 0});
      if (it != rank_of_.end() && it->first == item) scratch.push_back(it->second);
    }
    std::sort(scratch.begin(), scratch.end());
    scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
    std::int32_t node = 0;
    for (const std::size_t rank : scratch) node = child(node, rank, count);
  }

  // Prefix paths ending at each occurrence of the item at `rank`.
  template <typename Keep>
  void prefix_paths(std::size_t rank, Keep&& keep, PatternBase& base) const {
    base.items.clear();
    base.ends.clear();
    base.counts.clear();
    for (std::int32_t n = ranked_[rank].head; n != kNone; n = nodes_[n].next_same) {
      const std::size_t before = base.items.size();
      for (std::int32_t p = nodes_[n].parent; p > 0; p = nodes_[p].parent) {
        const Item item = ranked_[nodes_[p].rank].item;
        if (keep(item)) base.items.push_back(item);
      }
      if (base.items.size() == before) continue;
      base.ends.push_back(base.items.size());
      base.counts.push_back(nodes_[n].count);
    }
  }

 private:
  struct Node {
    std::size_t rank = 0;
    std::size_t count = 0;
    std::int32_t parent = kNone;
    std::int32_t first_child = kNone;
    std::int32_t next_sibling = kNone;
    std::int32_t next_same = kNone;
  };
  struct Header {
    Item item;
    std::size_t support;
    std::int32_t head;
  };

  std::int32_t child(std::int32_t parent, std::size_t rank, std::size_t count) {
    for (std::int32_t c = nodes_[parent].first_child; c != kNone; c = nodes_[c].next_sibling) {
      if (nodes_[c].rank == rank) {
        nodes_[c].count += count;
        return c;
      }
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    Node node;
    node.rank = rank;
    node.count = count;
    node.parent = parent;
    node.next_sibling = nodes_[parent].first_child;
    node.next_same = ranked_[rank].head;
    nodes_.push_back(node);
    nodes_[parent].first_child = id;
    ranked_[rank].head = id;
    return id;
  }

  std::vector<Node> nodes_;
  std::vector<Header> ranked_;
  std::vector<std::pair<Item, std::size_t>> rank_of_;  // sorted by item
};

class Miner {
 public:
  Miner(const FpGrowthOptions& options, std::size_t item_space, std::vector<FrequentItemset>& out)
      : options_(options), out_(out), dense_(item_space, 0) {}

  void mine(const FpTree& tree, std::vector<Item>& suffix) {
    // Least frequent first, so every prefix path only holds higher ranks.
    for (std::size_t rank = tree.rank_count(); rank-- > 0;) {
      const Item item = tree.item_at(rank);
      suffix.push_back(item);
      emit(suffix, tree.support_at(rank));

      if (static_cast<int>(suffix.size()) < options_.max_depth) {
        PatternBase base;
        tree.prefix_paths(
            rank,
            [&](Item other) {
              return std::none_of(suffix.begin(), suffix.end(),
                                  [&](Item s) { return group(s) == group(other); });
            },
            base);
        const auto counts = count_items(base);
        if (static_cast<int>(suffix.size()) + 1 == options_.max_depth) {
          // Last level: the conditional item counts are the supports.
          for (const auto& [other, count] : counts) {
            if (count < options_.min_support) continue;
            suffix.push_back(other);
            emit(suffix, count);
            suffix.pop_back();
          }
        } else {
          FpTree conditional(counts, options_.min_support);
          if (!conditional.empty()) {
            for (std::size_t k = 0; k < base.size(); ++k) {
              conditional.insert(base.path(k), base.counts[k], scratch_);
            }
            mine(conditional, suffix);
          }
        }
      }
      suffix.pop_back();
    }
  }

 private:
  std::size_t group(Item item) const {
    return options_.item_groups.empty() ? item : options_.item_groups[item];
  }

  // Per-item weight totals over the base, ascending by item.
  std::vector<std::pair<Item, std::size_t>> count_items(const PatternBase& base) {
    std::vector<Item> touched;
    for (std::size_t k = 0; k < base.size(); ++k) {
      for (const Item item : base.path(k)) {
        if (dense_[item] == 0) touched.push_back(item);
        dense_[item] += base.counts[k];
      }
    }
    std::sort(touched.begin(), touched.end());
    std::vector<std::pair<Item, std::size_t>> counts;
    counts.reserve(touched.size());
    for (const Item item : touched) {
      counts.emplace_back(item, dense_[item]);
      dense_[item] = 0;
    }
    return counts;
  }

  void emit(const std::vector<Item>& suffix, std::size_t support) {
    FrequentItemset set;
    set.items = suffix;
    std::sort(set.items.begin(), set.items.end());
    set.support = support;
    out_.push_back(std::move(set));
  }

  const FpGrowthOptions& options_;
  std::vector<FrequentItemset>& out_;
  std::vector<std::size_t> scratch_;
  std::vector<std::size_t> dense_;
};

}  // namespace

FpGrowthResult fp_growth(std::span<const Transaction> transactions,
                         const FpGrowthOptions& options) {
  if (options.max_depth < 1 || options.max_depth > 3) {
    throw Error("fp_growth: max_depth must be in [1, 3]");
  }
  FpGrowthOptions opts = options;
  opts.min_support = std::max<std::size_t>(1, opts.min_support);

  FpGrowthResult result;

  // Scan 1: item supports.
  std::vector<std::size_t> support;
  std::vector<std::size_t> last_seen;  // duplicate items in a transaction count once
  for (std::size_t tid = 0; tid < transactions.size(); ++tid) {
    for (const Item item : transactions[tid]) {
      if (item >= support.size()) {
        support.resize(item + 1, 0);
        last_seen.resize(item + 1, 0);
      }
      if (last_seen[item] == tid + 1) continue;
      last_seen[item] = tid + 1;
      ++support[item];
    }
  }
  ++result.database_scans;
  if (!opts.item_groups.empty() && support.size() > opts.item_groups.size()) {
    throw Error("fp_growth: item_groups does not cover every item");
  }

  std::vector<std::pair<Item, std::size_t>> counts;
  for (std::size_t item = 0; item < support.size(); ++item) {
    if (support[item]) counts.emplace_back(static_cast<Item>(item), support[item]);
  }
  FpTree tree(counts, opts.min_support);

  // Scan 2: build the tree.
  std::vector<std::size_t> scratch;
  for (const auto& t : transactions) tree.insert(t, 1, scratch);
  ++result.database_scans;

  std::vector<Item> suffix;
  Miner(opts, support.size(), result.itemsets).mine(tree, suffix);

  std::sort(result.itemsets.begin(), result.itemsets.end(),
            [](const FrequentItemset& a, const FrequentItemset& b) {
              if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
              return a.items < b.items;
            });
  return result;
}

}  // namespace riskpat
