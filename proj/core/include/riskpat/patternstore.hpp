#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "riskpat/dataset.hpp"
#include "riskpat/pattern.hpp"

namespace riskpat {

inline constexpr int kStoreSchemaVersion = 1;

// JSON document:
// {schema_version, created_at, dataset_fingerprint, global_target_mean, config,
//  patterns: [{id, constraints: [{feature, lo, hi}], members: [fips...],
//              mean_target, p_value, p_adjusted, direction, contributions}]}
nlohmann::json to_json(const MiningConfig& config);
MiningConfig mining_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PatternSet& set);
PatternSet pattern_set_from_json(const nlohmann::json& j);

std::string serialize_pattern_set(const PatternSet& set);
// Throws Error("corrupt pattern store: ...") on malformed input.
PatternSet parse_pattern_set(std::string_view text);

// Writes to a temporary sibling file, then renames it over `path`.
void save_pattern_set(const PatternSet& set, const std::filesystem::path& path);
PatternSet load_pattern_set(const std::filesystem::path& path);

// Message describing a fingerprint mismatch, or nullopt when they agree.
std::optional<std::string> fingerprint_warning(const PatternSet& set, const DataMatrix& matrix);

// Immutable pattern set plus the fips -> rank inverted index built on load.
class PatternStore {
 public:
  explicit PatternStore(PatternSet set);

  const PatternSet& set() const { return set_; }
  const std::vector<Pattern>& patterns() const { return set_.patterns; }

  // Zero-based rank of a pattern id.
  std::optional<std::size_t> rank_of(std::string_view id) const;
  const Pattern* find(std::string_view id) const;
  // Ascending ranks of the patterns containing the county; empty if none.
  std::span<const std::size_t> ranks_for_county(const std::string& fips) const;

 private:
  PatternSet set_;
  std::unordered_map<std::string, std::size_t> rank_by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> ranks_by_fips_;
};

// Pattern ids containing the county, in set order. Throws NotFoundError for a
// fips unknown to the matrix.
std::vector<std::string> patterns_for_county(const PatternStore& store, const DataMatrix& matrix,
                                             const std::string& fips);

struct RiskFactor {
  std::string feature;
  std::string units;
  std::size_t frequency = 0;  // containing patterns that constrain the feature
  double best_p_adjusted = 1.0;
  std::optional<double> county_value;
  std::optional<ValueRange> state_range;
  std::optional<ValueRange> us_range;
  double us_mean = kMissing;
};

// Features ranked by how many of the county's patterns constrain them; ties
// by best adjusted p (ascending), then feature name.
std::vector<RiskFactor> top_risk_factors(const PatternStore& store, const DataMatrix& matrix,
                                         const GlobalStats& stats, const std::string& fips,
                                         std::size_t k = 3);

struct DisplayRow {
  std::string feature;
  std::string units;
  ValueRange pattern_range;
  std::optional<ValueRange> us_range;
  double contribution = 0.0;
};

struct PatternDisplay {
  std::string id;
  std::size_t rank = 0;  // one-based
  Direction direction = Direction::high;
  double mean_target = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
  std::vector<DisplayRow> rows;  // constraint order
  std::vector<std::string> members;
};

PatternDisplay pattern_display(const PatternStore& store, const DataMatrix& matrix,
                               const GlobalStats& stats, std::string_view id);

}  // namespace riskpat
