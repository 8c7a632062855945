#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "riskpat/dataset.hpp"
#include "riskpat/patternstore.hpp"

namespace riskpat::api {

// Everything the read-only API serves. Built once, never mutated afterwards.
struct Context {
  DataMatrix matrix;
  GlobalStats stats;
  PatternStore store;
  std::optional<TargetTimeSeries> series;
  std::vector<std::string> warnings;

  Context(DataMatrix m, PatternSet set, std::optional<TargetTimeSeries> ts = std::nullopt);
};

nlohmann::json ok(nlohmann::json data);
nlohmann::json error(std::string_view code, std::string_view message);

// Data payloads (the `data` member of a successful envelope). The
// single-item builders throw NotFoundError for unknown keys.
nlohmann::json meta(const Context& ctx);
nlohmann::json counties(const Context& ctx);
nlohmann::json county_profile(const Context& ctx, const std::string& fips);
nlohmann::json patterns(const Context& ctx);
nlohmann::json pattern(const Context& ctx, std::string_view id);
nlohmann::json timeseries(const Context& ctx, const std::string& fips);

struct Response {
  int status = 200;
  nlohmann::json body;
};

// Routes a GET path under /api/ to its envelope; unknown paths give 404.
Response handle(const Context& ctx, std::string_view path);

// Text renderings of the pattern and county payloads above.
std::string format_pattern_panel(const nlohmann::json& pattern);
std::string format_county_panel(const nlohmann::json& profile);

}  // namespace riskpat::api
