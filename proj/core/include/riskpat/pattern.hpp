#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace riskpat {

// Which side of the national mean a pattern's target distribution sits on.
enum class Direction { high, low };
enum class DirectionMode { high, low, both };

std::string_view to_string(Direction d);
std::string_view to_string(DirectionMode d);
Direction parse_direction(std::string_view text);
DirectionMode parse_direction_mode(std::string_view text);

struct MiningConfig {
  std::size_t min_support = 20;
  double alpha = 0.01;  // applied to Benjamini-Hochberg adjusted p-values
  int max_depth = 3;
  int bins_per_feature = 3;
  int max_merge_run = 2;
  DirectionMode direction = DirectionMode::high;
  // Worker threads for candidate evaluation; 0 = hardware concurrency.
  // Not part of the persisted snapshot: results do not depend on it.
  unsigned threads = 0;

  // Throws riskpat::Error on out-of-range values.
  void validate() const;
  bool operator==(const MiningConfig& o) const {
    return min_support == o.min_support && alpha == o.alpha && max_depth == o.max_depth &&
           bins_per_feature == o.bins_per_feature && max_merge_run == o.max_merge_run &&
           direction == o.direction;
  }
};

// Closed interval constraint `lo <= feature <= hi` on raw feature values.
struct Constraint {
  std::string feature;
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const Constraint&) const = default;
};

struct Pattern {
  std::string id;
  std::vector<Constraint> constraints;  // 1-3, distinct features
  std::vector<std::string> members;     // fips, in matrix row order
  double mean_target = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
  Direction direction = Direction::high;
  std::vector<double> contributions;  // one per constraint, sums to 1

  bool operator==(const Pattern&) const = default;
};

struct PatternSet {
  std::vector<Pattern> patterns;
  double global_target_mean = 0.0;
  MiningConfig config;
  std::string created_at;  // ISO-8601 UTC
  std::string dataset_fingerprint;

  bool operator==(const PatternSet&) const = default;
};

// First 16 hex digits of SHA-256 over the constraints sorted by feature
// name, each serialized as `name \x1f lo \x1f hi \n` with shortest
// round-trip numbers. Stable across runs and machines.
std::string pattern_id(std::span<const Constraint> constraints);

// High block by descending mean, then low block by ascending mean; ties by id.
void sort_patterns(std::vector<Pattern>& patterns);
bool pattern_order_less(const Pattern& a, const Pattern& b);

std::string utc_timestamp_now();

}  // namespace riskpat
