#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskpat/county_set.hpp"
#include "riskpat/dataset.hpp"
#include "riskpat/discretizer.hpp"
#include "riskpat/fpgrowth.hpp"
#include "riskpat/pattern.hpp"
#include "riskpat/stats.hpp"

namespace riskpat {

enum class RejectReason {
  none,
  below_support,    // fewer than min_support members with a non-missing target
  too_few_inside,   // < 2 inside counties with a non-missing target
  too_few_outside,  // < 2 outside counties with a non-missing target
  degenerate,       // constant target or degenerate contingency table
  wrong_direction,  // mean on the wrong side of the national mean
  not_significant,
};

std::string_view to_string(RejectReason r);

struct Candidate {
  std::vector<std::size_t> member_rows;  // satisfy the constraints, target present
  std::size_t member_count = 0;
  double mean_target = 0.0;
  double p_value = 1.0;
  double log_p = 0.0;
  RejectReason reason = RejectReason::none;

  bool tested() const {
    return reason == RejectReason::none || reason == RejectReason::wrong_direction ||
           reason == RejectReason::not_significant;
  }
};

// Tests inside-vs-outside target distributions for arbitrary county sets.
// Numeric targets use the one-sided Mann-Whitney test; binary (0/1) targets
// use the chi-square test of independence on the inside/outside x 0/1 table.
class PatternEvaluator {
 public:
  explicit PatternEvaluator(const DataMatrix& matrix);

  // `inside` may contain counties with a missing target; they are dropped.
  // Leaves reason = none or wrong_direction; significance is decided later.
  // member_rows is only filled when `collect_members` is set.
  Candidate evaluate(const CountySet& inside, Direction direction,
                     bool collect_members = true) const;

  const DataMatrix& matrix() const { return matrix_; }

 private:
  const DataMatrix& matrix_;
  CountySet has_target_;
  std::vector<std::size_t> pooled_position_;  // row -> position in ranked_
  std::vector<double> row_midrank_;            // row -> pooled midrank
  std::optional<stats::RankedSample> ranked_;
  long long total_ones_ = 0;
};

// Counties whose raw values satisfy every constraint (missing never matches).
CountySet match_constraints(std::span<const Constraint> constraints, const DataMatrix& matrix);

// Splits counties by the itemset's intervals and runs the target test.
Candidate evaluate_pattern(const FrequentItemset& itemset, const ItemUniverse& universe,
                           const PatternEvaluator& evaluator, Direction direction);

// Leave-one-out log-p deterioration per constraint, normalized to sum 1.
std::vector<double> contribution_scores(const Pattern& pattern, const PatternEvaluator& evaluator);
std::vector<double> contribution_scores(const Pattern& pattern, const DataMatrix& matrix);

struct MiningReport {
  std::size_t items = 0;
  std::size_t frequent_itemsets = 0;
  std::size_t tested = 0;
  std::size_t significant = 0;
  std::size_t pruned_redundant = 0;
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

// discretize -> fp_growth -> evaluate -> BH adjust -> alpha filter ->
// redundancy pruning -> contributions -> ordering.
PatternSet mine(const DataMatrix& matrix, const MiningConfig& config,
                MiningReport* report = nullptr);

}  // namespace riskpat
