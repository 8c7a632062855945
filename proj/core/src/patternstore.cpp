#include "riskpat/patternstore.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "riskpat/error.hpp"

namespace riskpat {

using nlohmann::json;

json to_json(const MiningConfig& c) {
  return json{{"min_support", c.min_support},   {"alpha", c.alpha},
              {"max_depth", c.max_depth},       {"bins_per_feature", c.bins_per_feature},
              {"max_merge_run", c.max_merge_run}, {"direction", std::string(to_string(c.direction))}};
}

MiningConfig mining_config_from_json(const json& j) {
  MiningConfig c;
  c.min_support = j.at("min_support").get<std::size_t>();
  c.alpha = j.at("alpha").get<double>();
  c.max_depth = j.at("max_depth").get<int>();
  c.bins_per_feature = j.at("bins_per_feature").get<int>();
  c.max_merge_run = j.at("max_merge_run").get<int>();
  c.direction = parse_direction_mode(j.at("direction").get<std::string>());
  return c;
}

json to_json(const PatternSet& set) {
  json patterns = json::array();
  for (const auto& p : set.patterns) {
    json constraints = json::array();
    for (const auto& c : p.constraints) {
      constraints.push_back({{"feature", c.feature}, {"lo", c.lo}, {"hi", c.hi}});
    }
    patterns.push_back({{"id", p.id},
                        {"constraints", std::move(constraints)},
                        {"members", p.members},
                        {"mean_target", p.mean_target},
                        {"p_value", p.p_value},
                        {"p_adjusted", p.p_adjusted},
                        {"direction", std::string(to_string(p.direction))},
                        {"contributions", p.contributions}});
  }
  return json{{"schema_version", kStoreSchemaVersion},
              {"created_at", set.created_at},
              {"dataset_fingerprint", set.dataset_fingerprint},
              {"global_target_mean", set.global_target_mean},
              {"config", to_json(set.config)},
              {"patterns", std::move(patterns)}};
}

PatternSet pattern_set_from_json(const json& j) {
  try {
    if (!j.is_object()) throw Error("top level is not an object");
    const int version = j.at("schema_version").get<int>();
    if (version != kStoreSchemaVersion) {
      throw Error("unsupported schema_version " + std::to_string(version));
    }
    PatternSet set;
    set.created_at = j.at("created_at").get<std::string>();
    set.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
    set.global_target_mean = j.at("global_target_mean").get<double>();
    set.config = mining_config_from_json(j.at("config"));
    for (const auto& jp : j.at("patterns")) {
      Pattern p;
      p.id = jp.at("id").get<std::string>();
      for (const auto& jc : jp.at("constraints")) {
        p.constraints.push_back(
            {jc.at("feature").get<std::string>(), jc.at("lo").get<double>(), jc.at("hi").get<double>()});
      }
      p.members = jp.at("members").get<std::vector<std::string>>();
      p.mean_target = jp.at("mean_target").get<double>();
      p.p_value = jp.at("p_value").get<double>();
      p.p_adjusted = jp.at("p_adjusted").get<double>();
      p.direction = parse_direction(jp.at("direction").get<std::string>());
      p.contributions = jp.at("contributions").get<std::vector<double>>();
      if (p.constraints.empty() || p.contributions.size() != p.constraints.size()) {
        throw Error("pattern " + p.id + ": constraint/contribution mismatch");
      }
      set.patterns.push_back(std::move(p));
    }
    return set;
  } catch (const json::exception& e) {
    throw Error(std::string("corrupt pattern store: ") + e.what());
  } catch (const NotFoundError&) {
    throw;
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind("corrupt pattern store", 0) == 0) throw;
    throw Error("corrupt pattern store: " + what);
  }
}

std::string serialize_pattern_set(const PatternSet& set) { return to_json(set).dump(2) + "\n"; }

PatternSet parse_pattern_set(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(std::string("corrupt pattern store: ") + e.what());
  }
  return pattern_set_from_json(j);
}

void save_pattern_set(const PatternSet& set, const std::filesystem::path& path) {
  const std::string text = serialize_pattern_set(set);
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot move store into place at " + path.string() + ": " + ec.message());
  }
}

PatternSet load_pattern_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open pattern store " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pattern_set(buf.str());
}

std::optional<std::string> fingerprint_warning(const PatternSet& set, const DataMatrix& matrix) {
  const auto actual = dataset_fingerprint(matrix);
  if (actual == set.dataset_fingerprint) return std::nullopt;
  return "pattern store fingerprint " + set.dataset_fingerprint +
         " does not match the loaded matrix (" + actual + ")";
}

PatternStore::PatternStore(PatternSet set) : set_(std::move(set)) {
  for (std::size_t rank = 0; rank < set_.patterns.size(); ++rank) {
    const auto& p = set_.patterns[rank];
    if (!rank_by_id_.emplace(p.id, rank).second) throw Error("duplicate pattern id " + p.id);
    for (const auto& fips : p.members) ranks_by_fips_[fips].push_back(rank);
  }
}

std::optional<std::size_t> PatternStore::rank_of(std::string_view id) const {
  const auto it = rank_by_id_.find(std::string(id));
  if (it == rank_by_id_.end()) return std::nullopt;
  return it->second;
}

const Pattern* PatternStore::find(std::string_view id) const {
  const auto rank = rank_of(id);
  return rank ? &set_.patterns[*rank] : nullptr;
}

std::span<const std::size_t> PatternStore::ranks_for_county(const std::string& fips) const {
  const auto it = ranks_by_fips_.find(fips);
  if (it == ranks_by_fips_.end()) return {};
  return it->second;
}

std::vector<std::string> patterns_for_county(const PatternStore& store, const DataMatrix& matrix,
                                             const std::string& fips) {
  if (!matrix.find_county(fips)) throw NotFoundError("unknown fips " + fips);
  std::vector<std::string> ids;
  for (const auto rank : store.ranks_for_county(fips)) ids.push_back(store.patterns()[rank].id);
  return ids;
}

std::vector<RiskFactor> top_risk_factors(const PatternStore& store, const DataMatrix& matrix,
                                         const GlobalStats& stats, const std::string& fips,
                                         std::size_t k) {
  const auto row = matrix.find_county(fips);
  if (!row) throw NotFoundError("unknown fips " + fips);

  std::map<std::string, RiskFactor> by_feature;
  for (const auto rank : store.ranks_for_county(fips)) {
    const auto& p = store.patterns()[rank];
    for (const auto& c : p.constraints) {
      auto& rf = by_feature[c.feature];
      rf.feature = c.feature;
      ++rf.frequency;
      rf.best_p_adjusted = std::min(rf.best_p_adjusted, p.p_adjusted);
    }
  }

  std::vector<RiskFactor> ranked;
  for (auto& [name, rf] : by_feature) ranked.push_back(std::move(rf));
  std::sort(ranked.begin(), ranked.end(), [](const RiskFactor& a, const RiskFactor& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    if (a.best_p_adjusted != b.best_p_adjusted) return a.best_p_adjusted < b.best_p_adjusted;
    return a.feature < b.feature;
  });
  if (ranked.size() > k) ranked.resize(k);

  const auto& county = matrix.county(*row);
  for (auto& rf : ranked) {
    const auto f = matrix.find_feature(rf.feature);
    if (!f) continue;
    rf.units = matrix.feature(*f).units;
    const double v = matrix.value(*row, *f);
    if (!is_missing(v)) rf.county_value = v;
    rf.state_range = stats.state_range(county.state, *f);
    rf.us_range = stats.features[*f].range;
    rf.us_mean = stats.features[*f].mean;
  }
  return ranked;
}

PatternDisplay pattern_display(const PatternStore& store, const DataMatrix& matrix,
                               const GlobalStats& stats, std::string_view id) {
  const auto rank = store.rank_of(id);
  if (!rank) throw NotFoundError("unknown pattern id " + std::string(id));
  const auto& p = store.patterns()[*rank];

  PatternDisplay d;
  d.id = p.id;
  d.rank = *rank + 1;
  d.direction = p.direction;
  d.mean_target = p.mean_target;
  d.p_value = p.p_value;
  d.p_adjusted = p.p_adjusted;
  d.members = p.members;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    DisplayRow row;
    row.feature = c.feature;
    row.pattern_range = {c.lo, c.hi};
    row.contribution = i < p.contributions.size() ? p.contributions[i] : 0.0;
    if (const auto f = matrix.find_feature(c.feature)) {
      row.units = matrix.feature(*f).units;
      row.us_range = stats.features[*f].range;
    }
    d.rows.push_back(std::move(row));
  }
  return d;
}

}  // namespace riskpat
