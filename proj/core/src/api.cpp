#include "riskpat/api.hpp"

#include <cstdio>
#include <sstream>

#include "riskpat/error.hpp"

namespace riskpat::api {

using nlohmann::json;

namespace {

json number_or_null(double v) { return is_missing(v) ? json(nullptr) : json(v); }

json range_json(const std::optional<ValueRange>& r) {
  if (!r) return nullptr;
  return {{"lo", r->lo}, {"hi", r->hi}};
}

json date_axis(const Context& ctx) {
  json dates = json::array();
  if (ctx.series) {
    for (const auto d : ctx.series->dates) dates.push_back(format_date(d));
  }
  return dates;
}

std::size_t require_county(const Context& ctx, const std::string& fips) {
  const auto row = ctx.matrix.find_county(fips);
  if (!row) throw NotFoundError("unknown fips " + fips);
  return *row;
}

std::string num(const json& v) {
  return v.is_null() ? std::string("n/a") : format_number(v.get<double>());
}

std::string range_text(const json& r) {
  if (r.is_null()) return "n/a";
  return "[" + num(r.at("lo")) + ", " + num(r.at("hi")) + "]";
}

std::string fixed(double v, const char* fmt) {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

Context::Context(DataMatrix m, PatternSet set, std::optional<TargetTimeSeries> ts)
    : matrix(std::move(m)),
      stats(global_stats(matrix)),
      store(std::move(set)),
      series(std::move(ts)) {
  if (auto w = fingerprint_warning(store.set(), matrix)) warnings.push_back(std::move(*w));
}

json ok(json data) { return {{"status", "ok"}, {"data", std::move(data)}}; }

json error(std::string_view code, std::string_view message) {
  return {{"status", "error"}, {"error", {{"code", code}, {"message", message}}}};
}

json meta(const Context& ctx) {
  const auto& set = ctx.store.set();
  return {{"target_name", ctx.matrix.target_name()},
          {"global_target_mean", set.global_target_mean},
          {"pattern_count", set.patterns.size()},
          {"dataset_fingerprint", set.dataset_fingerprint},
          {"date_axis", date_axis(ctx)}};
}

json counties(const Context& ctx) {
  json out = json::array();
  const auto target = ctx.matrix.target();
  for (std::size_t r = 0; r < ctx.matrix.county_count(); ++r) {
    const auto& c = ctx.matrix.county(r);
    out.push_back({{"fips", c.fips},
                   {"name", c.name},
                   {"state", c.state},
                   {"target_value", number_or_null(target[r])}});
  }
  return out;
}

json county_profile(const Context& ctx, const std::string& fips) {
  const std::size_t row = require_county(ctx, fips);
  const auto& c = ctx.matrix.county(row);

  json series = nullptr;
  if (ctx.series) {
    if (const auto* values = ctx.series->find(fips)) {
      series = {{"dates", date_axis(ctx)}, {"values", *values}};
    }
  }
  json factors = json::array();
  for (const auto& rf : top_risk_factors(ctx.store, ctx.matrix, ctx.stats, fips)) {
    factors.push_back({{"feature", rf.feature},
                       {"units", rf.units},
                       {"county_value", rf.county_value ? json(*rf.county_value) : json(nullptr)},
                       {"state_range", range_json(rf.state_range)},
                       {"us_range", range_json(rf.us_range)},
                       {"us_mean", number_or_null(rf.us_mean)},
                       {"frequency", rf.frequency},
                       {"best_p_adjusted", rf.best_p_adjusted}});
  }
  return {{"fips", c.fips},
          {"name", c.name},
          {"state", c.state},
          {"target_value", number_or_null(ctx.matrix.target()[row])},
          {"target_series", std::move(series)},
          {"pattern_ids", patterns_for_county(ctx.store, ctx.matrix, fips)},
          {"top_risk_factors", std::move(factors)}};
}

json patterns(const Context& ctx) {
  json out = json::array();
  const auto& all = ctx.store.patterns();
  for (std::size_t i = 0; i < all.size(); ++i) {
    out.push_back({{"pattern_id", all[i].id},
                   {"rank", i + 1},
                   {"mean_target", all[i].mean_target},
                   {"constraint_count", all[i].constraints.size()},
                   {"direction", to_string(all[i].direction)}});
  }
  return out;
}

json pattern(const Context& ctx, std::string_view id) {
  const auto d = pattern_display(ctx.store, ctx.matrix, ctx.stats, id);
  json rows = json::array();
  for (const auto& row : d.rows) {
    rows.push_back({{"feature", row.feature},
                    {"units", row.units},
                    {"pattern_range", range_json(row.pattern_range)},
                    {"us_range", range_json(row.us_range)},
                    {"contribution", row.contribution}});
  }
  return {{"pattern_id", d.id},
          {"rank", d.rank},
          {"direction", to_string(d.direction)},
          {"mean_target", d.mean_target},
          {"p_value", d.p_value},
          {"p_adjusted", d.p_adjusted},
          {"constraints", std::move(rows)},
          {"member_count", d.members.size()},
          {"members", d.members}};
}

json timeseries(const Context& ctx, const std::string& fips) {
  const auto* values = ctx.series ? ctx.series->find(fips) : nullptr;
  if (!values) throw NotFoundError("no time series for fips " + fips);
  return {{"fips", fips}, {"dates", date_axis(ctx)}, {"values", *values}};
}

Response handle(const Context& ctx, std::string_view path) {
  auto tail = [&](std::string_view prefix) -> std::optional<std::string> {
    if (path.size() <= prefix.size() || path.substr(0, prefix.size()) != prefix) return std::nullopt;
    const auto rest = path.substr(prefix.size());
    if (rest.find('/') != std::string_view::npos) return std::nullopt;
    return std::string(rest);
  };
  try {
    if (path == "/api/meta") return {200, ok(meta(ctx))};
    if (path == "/api/counties") return {200, ok(counties(ctx))};
    if (path == "/api/patterns") return {200, ok(patterns(ctx))};
    if (const auto fips = tail("/api/counties/")) return {200, ok(county_profile(ctx, *fips))};
    if (const auto id = tail("/api/patterns/")) return {200, ok(pattern(ctx, *id))};
    if (const auto fips = tail("/api/timeseries/")) return {200, ok(timeseries(ctx, *fips))};
    return {404, error("not_found", "no route for " + std::string(path))};
  } catch (const NotFoundError& e) {
    return {404, error("not_found", e.what())};
  } catch (const std::exception& e) {
    return {500, error("internal", e.what())};
  }
}

std::string format_pattern_panel(const json& p) {
  std::ostringstream out;
  out << "pattern " << p.at("pattern_id").get<std::string>() << " (rank "
      << p.at("rank").get<std::size_t>() << ", " << p.at("direction").get<std::string>() << ")\n";
  out << "mean target: " << num(p.at("mean_target")) << "\n";
  out << "p-value: " << num(p.at("p_value")) << ", adjusted: " << num(p.at("p_adjusted")) << "\n";
  out << "constraints:\n";
  for (const auto& row : p.at("constraints")) {
    out << "  " << row.at("feature").get<std::string>() << ": "
        << range_text(row.at("pattern_range")) << " of US " << range_text(row.at("us_range"))
        << "  weight " << fixed(row.at("contribution").get<double>(), "%.3f");
    const auto units = row.at("units").get<std::string>();
    if (!units.empty()) out << "  units " << units;
    out << "\n";
  }
  out << "members (" << p.at("member_count").get<std::size_t>() << "):";
  for (const auto& fips : p.at("members")) out << " " << fips.get<std::string>();
  out << "\n";
  return out.str();
}

std::string format_county_panel(const json& c) {
  std::ostringstream out;
  out << c.at("fips").get<std::string>() << " " << c.at("name").get<std::string>() << ", "
      << c.at("state").get<std::string>() << "\n";
  out << "target: " << num(c.at("target_value")) << "\n";
  const auto& series = c.at("target_series");
  if (series.is_null()) {
    out << "series: none\n";
  } else {
    out << "series:";
    const auto& dates = series.at("dates");
    const auto& values = series.at("values");
    for (std::size_t i = 0; i < dates.size(); ++i) {
      out << " " << dates[i].get<std::string>() << "=" << num(values[i]);
    }
    out << "\n";
  }
  const auto& ids = c.at("pattern_ids");
  if (ids.empty()) {
    out << "no risk patterns\n";
    return out.str();
  }
  out << "patterns (" << ids.size() << "):";
  for (const auto& id : ids) out << " " << id.get<std::string>();
  out << "\n";
  out << "top risk factors:\n";
  for (const auto& rf : c.at("top_risk_factors")) {
    out << "  " << rf.at("feature").get<std::string>() << ": " << num(rf.at("county_value"))
        << " (state " << range_text(rf.at("state_range")) << ", US "
        << range_text(rf.at("us_range")) << ", US mean " << num(rf.at("us_mean")) << ") in "
        << rf.at("frequency").get<std::size_t>() << " patterns, best adjusted p "
        << num(rf.at("best_p_adjusted"));
    const auto units = rf.at("units").get<std::string>();
    if (!units.empty()) out << ", units " << units;
    out << "\n";
  }
  return out.str();
}

}  // namespace riskpat::api
