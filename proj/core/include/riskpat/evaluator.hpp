#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "riskpat/dataset.hpp"
#include "riskpat/pattern.hpp"

namespace riskpat {

inline constexpr double kDefaultGrowthThreshold = 2.0;

struct PatternGrowth {
  std::string id;
  double member_growth = kMissing;   // mean increment of members found in the series
  std::optional<double> ratio;       // member_growth / national_growth
  std::size_t members_in_series = 0;
  std::size_t members_excluded = 0;  // members absent from the series
};

struct GrowthReport {
  Date t0{};
  Date t1{};
  double threshold = kDefaultGrowthThreshold;
  double national_growth = 0.0;
  std::size_t national_counties = 0;
  std::vector<PatternGrowth> per_pattern;  // set order
  // Fraction of patterns with a defined ratio that reach the threshold.
  double share_exceeding = 0.0;
  std::vector<std::string> notes;
};

// Growth is the difference of cumulative values between the two dates.
// Dates off the series axis snap to the nearest earlier axis date (noted in
// the report). Throws Error when t0 >= t1, when a date precedes the axis, or
// when the national mean increment is zero. An empty set yields an empty
// report without consulting the series.
GrowthReport evaluate_growth(const PatternSet& set, const TargetTimeSeries& ts, Date t0, Date t1,
                             double threshold = kDefaultGrowthThreshold);

struct NewlyAffected {
  std::string id;
  std::vector<std::string> fips;  // member order
};

// Members with value <= floor at t0 and > floor at t1, per pattern.
std::vector<NewlyAffected> newly_affected(const PatternSet& set, const TargetTimeSeries& ts,
                                          Date t0, Date t1, double floor);

nlohmann::json to_json(const GrowthReport& report);
std::string format_growth_table(const GrowthReport& report);

}  // namespace riskpat
