#include "riskpat/evaluator.hpp"

#include <cstdio>
#include <sstream>

#include "riskpat/error.hpp"

namespace riskpat {
namespace {

struct Window {
  std::size_t i0 = 0;
  std::size_t i1 = 0;
};

std::size_t snap(const TargetTimeSeries& ts, Date d, const char* label,
                 std::vector<std::string>* notes) {
  const auto idx = ts.snap_index(d);
  if (!idx) {
    throw Error(std::string(label) + " " + format_date(d) + " precedes the series date axis");
  }
  if (notes && ts.dates[*idx] != d) {
    notes->push_back(std::string(label) + " " + format_date(d) + " snapped to " +
                     format_date(ts.dates[*idx]));
  }
  return *idx;
}

Window resolve_window(const TargetTimeSeries& ts, Date t0, Date t1,
                      std::vector<std::string>* notes) {
  if (!(t0 < t1)) throw Error("t0 must be earlier than t1");
  return {snap(ts, t0, "t0", notes), snap(ts, t1, "t1", notes)};
}

}  // namespace

GrowthReport evaluate_growth(const PatternSet& set, const TargetTimeSeries& ts, Date t0, Date t1,
                             double threshold) {
  if (!(t0 < t1)) throw Error("t0 must be earlier than t1");
  GrowthReport report;
  report.t0 = t0;
  report.t1 = t1;
  report.threshold = threshold;
  if (set.patterns.empty()) return report;

  const Window w = resolve_window(ts, t0, t1, &report.notes);
  report.t0 = ts.dates[w.i0];
  report.t1 = ts.dates[w.i1];

  double total = 0.0;
  for (const auto& [fips, values] : ts.series) total += values[w.i1] - values[w.i0];
  report.national_counties = ts.series.size();
  if (report.national_counties == 0 || total <= 0.0) {
    throw Error("no national growth in window");
  }
  report.national_growth = total / static_cast<double>(report.national_counties);

  std::size_t defined = 0;
  std::size_t exceeding = 0;
  for (const auto& p : set.patterns) {
    PatternGrowth g;
    g.id = p.id;
    double sum = 0.0;
    for (const auto& fips : p.members) {
      const auto* values = ts.find(fips);
      if (!values) {
        ++g.members_excluded;
        continue;
      }
      sum += (*values)[w.i1] - (*values)[w.i0];
      ++g.members_in_series;
    }
    if (g.members_in_series > 0) {
      g.member_growth = sum / static_cast<double>(g.members_in_series);
      g.ratio = g.member_growth / report.national_growth;
      ++defined;
      if (*g.ratio >= threshold) ++exceeding;
    }
    report.per_pattern.push_back(std::move(g));
  }
  report.share_exceeding =
      defined ? static_cast<double>(exceeding) / static_cast<double>(defined) : 0.0;
  return report;
}

std::vector<NewlyAffected> newly_affected(const PatternSet& set, const TargetTimeSeries& ts,
                                          Date t0, Date t1, double floor) {
  std::vector<NewlyAffected> out;
  if (set.patterns.empty()) return out;
  const Window w = resolve_window(ts, t0, t1, nullptr);
  for (const auto& p : set.patterns) {
    NewlyAffected entry{p.id, {}};
    for (const auto& fips : p.members) {
      const auto* values = ts.find(fips);
      if (values && (*values)[w.i0] <= floor && (*values)[w.i1] > floor) {
        entry.fips.push_back(fips);
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

nlohmann::json to_json(const GrowthReport& report) {
  nlohmann::json per_pattern = nlohmann::json::array();
  for (const auto& g : report.per_pattern) {
    per_pattern.push_back({{"pattern_id", g.id},
                           {"member_growth", g.members_in_series ? nlohmann::json(g.member_growth)
                                                                 : nlohmann::json(nullptr)},
                           {"national_growth", report.national_growth},
                           {"ratio", g.ratio ? nlohmann::json(*g.ratio) : nlohmann::json(nullptr)},
                           {"members_in_series", g.members_in_series},
                           {"members_excluded", g.members_excluded}});
  }
  return {{"t0", format_date(report.t0)},
          {"t1", format_date(report.t1)},
          {"threshold", report.threshold},
          {"national_growth", report.national_growth},
          {"national_counties", report.national_counties},
          {"share_exceeding", report.share_exceeding},
          {"per_pattern", std::move(per_pattern)},
          {"notes", report.notes}};
}

std::string format_growth_table(const GrowthReport& report) {
  std::ostringstream out;
  out << "window " << format_date(report.t0) << " .. " << format_date(report.t1) << "\n";
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  if (report.per_pattern.empty()) {
    out << "0 patterns\n";
    return out.str();
  }
  out << "national growth " << format_number(report.national_growth) << " over "
      << report.national_counties << " counties\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %14s %8s %9s %9s\n", "pattern", "member_growth",
                "ratio", "in_series", "excluded");
  out << line;
  for (const auto& g : report.per_pattern) {
    char ratio[32] = "-";
    char growth[32] = "-";
    if (g.ratio) std::snprintf(ratio, sizeof ratio, "%.3f", *g.ratio);
    if (g.members_in_series) std::snprintf(growth, sizeof growth, "%.4g", g.member_growth);
    std::snprintf(line, sizeof line, "%-18s %14s %8s %9zu %9zu\n", g.id.c_str(), growth, ratio,
                  g.members_in_series, g.members_excluded);
    out << line;
  }
  std::snprintf(line, sizeof line, "share with ratio >= %g: %.4f\n", report.threshold,
                report.share_exceeding);
  out << line;
  return out.str();
}

}  // namespace riskpat
