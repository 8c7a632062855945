#include "riskpat/pattern.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>

#include "riskpat/dataset.hpp"
#include "riskpat/error.hpp"
#include "riskpat/hash.hpp"

namespace riskpat {

std::string_view to_string(Direction d) { return d == Direction::high ? "high" : "low"; }

std::string_view to_string(DirectionMode d) {
  switch (d) {
    case DirectionMode::high: return "high";
    case DirectionMode::low: return "low";
    case DirectionMode::both: return "both";
  }
  return "high";
}

Direction parse_direction(std::string_view text) {
  if (text == "high") return Direction::high;
  if (text == "low") return Direction::low;
  throw Error("unknown direction '" + std::string(text) + "'");
}

DirectionMode parse_direction_mode(std::string_view text) {
  if (text == "high") return DirectionMode::high;
  if (text == "low") return DirectionMode::low;
  if (text == "both") return DirectionMode::both;
  throw Error("unknown direction '" + std::string(text) + "' (expected high, low or both)");
}

void MiningConfig::validate() const {
  if (min_support < 2) throw Error("min_support must be at least 2");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie strictly between 0 and 1");
  if (max_depth < 1 || max_depth > 3) throw Error("max_depth must be 1, 2 or 3");
  if (bins_per_feature < 2) throw Error("bins_per_feature must be at least 2");
  if (max_merge_run < 1) throw Error("max_merge_run must be at least 1");
}

std::string pattern_id(std::span<const Constraint> constraints) {
  std::vector<const Constraint*> sorted;
  for (const auto& c : constraints) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const Constraint* a, const Constraint* b) { return a->feature < b->feature; });
  std::string canonical;
  for (const auto* c : sorted) {
    canonical += c->feature;
    canonical += '\x1f';
    canonical += format_number(c->lo);
    canonical += '\x1f';
    canonical += format_number(c->hi);
    canonical += '\n';
  }
  return sha256_hex(canonical).substr(0, 16);
}

bool pattern_order_less(const Pattern& a, const Pattern& b) {
  if (a.direction != b.direction) return a.direction == Direction::high;
  if (a.mean_target != b.mean_target) {
    return a.direction == Direction::high ? a.mean_target > b.mean_target
                                          : a.mean_target < b.mean_target;
  }
  return a.id < b.id;
}

void sort_patterns(std::vector<Pattern>& patterns) {
  std::sort(patterns.begin(), patterns.end(), pattern_order_less);
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace riskpat
