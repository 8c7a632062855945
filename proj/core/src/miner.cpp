#include "riskpat/miner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>

#include "riskpat/error.hpp"

namespace riskpat {

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::below_support: return "below_support";
    case RejectReason::too_few_inside: return "too_few_inside";
    case RejectReason::too_few_outside: return "too_few_outside";
    case RejectReason::degenerate: return "degenerate";
    case RejectReason::wrong_direction: return "wrong_direction";
    case RejectReason::not_significant: return "not_significant";
  }
  return "none";
}

PatternEvaluator::PatternEvaluator(const DataMatrix& matrix)
    : matrix_(matrix), has_target_(matrix.county_count()) {
  const auto target = matrix.target();
  pooled_position_.assign(matrix.county_count(), 0);
  std::vector<double> pooled;
  for (std::size_t r = 0; r < target.size(); ++r) {
    if (is_missing(target[r])) continue;
    has_target_.insert(r);
    pooled_position_[r] = pooled.size();
    pooled.push_back(target[r]);
    if (target[r] == 1.0) ++total_ones_;
  }
  if (!matrix.binary_target()) {
    ranked_.emplace(std::move(pooled));
    row_midrank_.assign(matrix.county_count(), 0.0);
    has_target_.for_each([&](std::size_t r) { row_midrank_[r] = ranked_->midrank(pooled_position_[r]); });
  }
}

Candidate PatternEvaluator::evaluate(const CountySet& inside, Direction direction,
                                     bool collect_members) const {
  Candidate c;
  const CountySet members = inside & has_target_;
  const auto target = matrix_.target();

  std::size_t n_in = 0;
  double sum = 0.0;
  double rank_sum = 0.0;
  long long ones = 0;
  members.for_each([&](std::size_t r) {
    if (collect_members) c.member_rows.push_back(r);
    ++n_in;
    sum += target[r];
    if (!row_midrank_.empty()) rank_sum += row_midrank_[r];
    if (target[r] == 1.0) ++ones;
  });
  const std::size_t n_out = matrix_.target_count() - n_in;
  c.member_count = n_in;

  if (n_in < 2) {
    c.reason = RejectReason::too_few_inside;
    return c;
  }
  if (n_out < 2) {
    c.reason = RejectReason::too_few_outside;
    return c;
  }
  c.mean_target = sum / static_cast<double>(n_in);

  if (matrix_.binary_target()) {
    const long long in = static_cast<long long>(n_in);
    const long long out = static_cast<long long>(n_out);
    const long long out_ones = total_ones_ - ones;
    try {
      const auto chi = stats::chi_square_independence({{ones, in - ones}, {out_ones, out - out_ones}});
      c.p_value = chi.p;
      c.log_p = chi.log_p;
    } catch (const Error&) {
      c.reason = RejectReason::degenerate;
      return c;
    }
  } else {
    const auto alt =
        direction == Direction::high ? stats::Alternative::greater : stats::Alternative::less;
    const bool exact = n_in <= stats::kExactLimit && n_out <= stats::kExactLimit;
    stats::MannWhitneyResult mw;
    if (exact) {
      std::vector<std::size_t> positions;
      members.for_each([&](std::size_t r) { positions.push_back(pooled_position_[r]); });
      mw = ranked_->test(positions, alt);
    } else {
      mw = ranked_->test_rank_sum(rank_sum, n_in, alt);
    }
    if (mw.degenerate) {
      c.reason = RejectReason::degenerate;
      return c;
    }
    c.p_value = mw.p_one_sided;
    c.log_p = mw.log_p;
  }

  const double global = matrix_.global_target_mean();
  const bool right_side =
      direction == Direction::high ? c.mean_target > global : c.mean_target < global;
  if (!right_side) c.reason = RejectReason::wrong_direction;
  return c;
}

CountySet match_constraints(std::span<const Constraint> constraints, const DataMatrix& matrix) {
  CountySet out(matrix.county_count());
  std::vector<std::span<const double>> columns;
  for (const auto& c : constraints) {
    const auto f = matrix.find_feature(c.feature);
    if (!f) throw NotFoundError("unknown feature '" + c.feature + "'");
    columns.push_back(matrix.column(*f));
  }
  for (std::size_t r = 0; r < matrix.county_count(); ++r) {
    bool ok = true;
    for (std::size_t k = 0; k < constraints.size() && ok; ++k) {
      const double v = columns[k][r];
      ok = !is_missing(v) && constraints[k].lo <= v && v <= constraints[k].hi;
    }
    if (ok) out.insert(r);
  }
  return out;
}

namespace {

CountySet itemset_members(std::span<const Item> items, const ItemUniverse& universe) {
  CountySet inside = universe.members(items.front());
  for (std::size_t k = 1; k < items.size(); ++k) inside &= universe.members(items[k]);
  return inside;
}

std::vector<Constraint> itemset_constraints(std::span<const Item> items,
                                            const ItemUniverse& universe,
                                            const DataMatrix& matrix) {
  std::vector<Constraint> out;
  for (const Item id : items) {
    const auto& iv = universe.item(id);
    out.push_back({matrix.feature(iv.feature_id).name, iv.lo, iv.hi});
  }
  return out;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || n < 1024) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

}  // namespace

Candidate evaluate_pattern(const FrequentItemset& itemset, const ItemUniverse& universe,
                           const PatternEvaluator& evaluator, Direction direction) {
  if (itemset.items.empty()) throw Error("evaluate_pattern: empty itemset");
  return evaluator.evaluate(itemset_members(itemset.items, universe), direction);
}

std::vector<double> contribution_scores(const Pattern& pattern,
                                        const PatternEvaluator& evaluator) {
  const std::size_t k = pattern.constraints.size();
  if (k == 0) throw Error("contribution_scores: pattern has no constraints");
  if (k == 1) return {1.0};

  const auto& matrix = evaluator.matrix();
  auto log_p_of = [&](std::span<const Constraint> constraints) {
    const auto c = evaluator.evaluate(match_constraints(constraints, matrix), pattern.direction,
                                      /*collect_members=*/false);
    // An untestable reduced pattern counts as p = 1.
    return c.tested() ? c.log_p : 0.0;
  };

  const double full = log_p_of(pattern.constraints);
  std::vector<double> raw(k, 0.0);
  for (std::size_t drop = 0; drop < k; ++drop) {
    std::vector<Constraint> reduced;
    for (std::size_t j = 0; j < k; ++j) {
      if (j != drop) reduced.push_back(pattern.constraints[j]);
    }
    raw[drop] = std::max(0.0, log_p_of(reduced) - full);
  }
  double total = 0.0;
  for (const double r : raw) total += r;
  std::vector<double> weights(k, 1.0 / static_cast<double>(k));
  if (total > 0.0 && std::isfinite(total)) {
    for (std::size_t j = 0; j < k; ++j) weights[j] = raw[j] / total;
  }
  return weights;
}

std::vector<double> contribution_scores(const Pattern& pattern, const DataMatrix& matrix) {
  return contribution_scores(pattern, PatternEvaluator(matrix));
}

namespace {

std::vector<Pattern> mine_direction(const DataMatrix& matrix, const MiningConfig& config,
                                    const ItemUniverse& universe,
                                    const std::vector<FrequentItemset>& itemsets,
                                    const PatternEvaluator& evaluator, Direction direction,
                                    MiningReport& report) {
  std::vector<Candidate> candidates(itemsets.size());
  parallel_for(itemsets.size(), config.threads, [&](std::size_t i) {
    auto c = evaluator.evaluate(itemset_members(itemsets[i].items, universe), direction,
                                /*collect_members=*/false);
    if (c.tested() && c.member_count < config.min_support) c.reason = RejectReason::below_support;
    candidates[i] = std::move(c);
  });

  std::vector<std::size_t> tested;
  std::vector<double> raw_p;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].tested()) continue;
    tested.push_back(i);
    raw_p.push_back(candidates[i].p_value);
  }
  report.tested += tested.size();
  const auto adjusted = stats::bh_adjust(raw_p);

  // itemset -> adjusted p, for every significant candidate
  std::map<std::vector<Item>, std::size_t> significant;
  std::vector<double> p_adjusted(candidates.size(), 1.0);
  for (std::size_t k = 0; k < tested.size(); ++k) {
    const std::size_t i = tested[k];
    p_adjusted[i] = adjusted[k];
    if (candidates[i].reason == RejectReason::none && adjusted[k] <= config.alpha) {
      significant.emplace(itemsets[i].items, i);
    } else if (candidates[i].reason == RejectReason::none) {
      candidates[i].reason = RejectReason::not_significant;
    }
  }
  report.significant += significant.size();

  auto dominated_by = [&](std::size_t sub, std::size_t sup) {
    if (p_adjusted[sub] > p_adjusted[sup]) return false;
    return direction == Direction::high
               ? candidates[sub].mean_target >= candidates[sup].mean_target
               : candidates[sub].mean_target <= candidates[sup].mean_target;
  };

  std::vector<Pattern> out;
  for (const auto& [items, i] : significant) {
    bool redundant = false;
    const std::size_t k = items.size();
    // Every strict non-empty subset of a 2- or 3-itemset.
    for (unsigned mask = 1; mask + 1 < (1u << k) && !redundant; ++mask) {
      std::vector<Item> subset;
      for (std::size_t b = 0; b < k; ++b) {
        if (mask & (1u << b)) subset.push_back(items[b]);
      }
      const auto it = significant.find(subset);
      redundant = it != significant.end() && dominated_by(it->second, i);
    }
    if (redundant) {
      ++report.pruned_redundant;
      continue;
    }

    Pattern p;
    p.constraints = itemset_constraints(items, universe, matrix);
    p.id = pattern_id(p.constraints);
    p.direction = direction;
    p.p_value = candidates[i].p_value;
    p.p_adjusted = p_adjusted[i];
    const auto full = evaluator.evaluate(itemset_members(items, universe), direction);
    p.mean_target = full.mean_target;
    for (const auto r : full.member_rows) p.members.push_back(matrix.county(r).fips);
    p.contributions = contribution_scores(p, evaluator);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

PatternSet mine(const DataMatrix& matrix, const MiningConfig& config, MiningReport* report) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  if (matrix.county_count() < config.min_support) {
    throw Error("matrix has fewer counties (" + std::to_string(matrix.county_count()) +
                ") than min_support (" + std::to_string(config.min_support) + ")");
  }

  MiningReport local;
  MiningReport& rep = report ? *report : local;
  rep = MiningReport{};

  const auto bins = build_base_bins(matrix, config.bins_per_feature);
  rep.warnings = bins.warnings;
  const auto universe = build_item_universe(matrix, bins, config.max_merge_run);
  rep.items = universe.item_count();

  FpGrowthOptions fp;
  fp.min_support = config.min_support;
  fp.max_depth = config.max_depth;
  fp.item_groups = universe.item_features();
  const auto frequent = fp_growth(universe.transactions(), fp);
  rep.frequent_itemsets = frequent.itemsets.size();

  const PatternEvaluator evaluator(matrix);
  PatternSet set;
  std::vector<Direction> directions;
  if (config.direction != DirectionMode::low) directions.push_back(Direction::high);
  if (config.direction != DirectionMode::high) directions.push_back(Direction::low);
  for (const auto d : directions) {
    auto found = mine_direction(matrix, config, universe, frequent.itemsets, evaluator, d, rep);
    set.patterns.insert(set.patterns.end(), std::make_move_iterator(found.begin()),
                        std::make_move_iterator(found.end()));
  }
  sort_patterns(set.patterns);

  set.global_target_mean = matrix.global_target_mean();
  set.config = config;
  set.created_at = utc_timestamp_now();
  set.dataset_fingerprint = dataset_fingerprint(matrix);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return set;
}

}  // namespace riskpat
