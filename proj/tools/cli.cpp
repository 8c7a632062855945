#include "cli.hpp"

#include <csignal>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <pthread.h>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "riskpat/api.hpp"
#include "riskpat/error.hpp"
#include "riskpat/evaluator.hpp"
#include "riskpat/miner.hpp"
#include "riskpat/patternstore.hpp"
#include "riskpat/server.hpp"
#include "riskpat/synthetic.hpp"

namespace riskpat::cli {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by the commands that read the dataset.
struct DataArgs {
  std::string config;
  std::string matrix;
  std::string target;
  std::string timeseries;
};

struct MineArgs {
  DataArgs data;
  std::string out;
  std::optional<std::size_t> min_support;
  std::optional<double> alpha;
  std::optional<int> max_depth;
  std::optional<int> bins;
  std::optional<int> max_merge_run;
  std::optional<std::string> direction;
  std::optional<unsigned> threads;
};

struct ServeArgs {
  DataArgs data;
  std::string store;
  std::string geojson;
  std::string host = "127.0.0.1";
  int port = 8080;
  bool no_cors = false;
};

struct EvaluateArgs {
  DataArgs data;
  std::string store;
  std::string t0;
  std::string t1;
  double threshold = kDefaultGrowthThreshold;
  std::optional<double> floor;
  std::string json_out;
};

struct InspectArgs {
  DataArgs data;
  std::string store;
  std::string pattern;
  std::string county;
  bool json = false;
};

struct SynthArgs {
  std::string out_dir;
  std::size_t counties = 3000;
  std::size_t features = 20;
  std::size_t cells = 1;
  std::uint64_t seed = 1;
  bool shuffle = false;
  bool growth = false;
};

void add_data_flags(CLI::App* cmd, DataArgs& a, bool with_series) {
  cmd->add_option("--config", a.config, "key=value config file (schema and mining keys)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--matrix", a.matrix, "county x feature CSV")->check(CLI::ExistingFile);
  cmd->add_option("--target", a.target, "target column (overrides target_column)");
  if (with_series) {
    cmd->add_option("--timeseries", a.timeseries, "wide CSV of cumulative target values")
        ->check(CLI::ExistingFile);
  }
}

KeyValueConfig load_config(const DataArgs& a) {
  return a.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(a.config);
}

// Flag value, else config key, else empty; a resolved path must exist.
std::string resolve_path(const std::string& flag, const KeyValueConfig& cfg, const std::string& key,
                         bool required) {
  std::string path = flag.empty() ? cfg.get_or(key, "") : flag;
  if (path.empty()) {
    if (required) throw UsageError("--" + key + " is required");
    return path;
  }
  if (!fs::is_regular_file(path)) throw UsageError("--" + key + ": file not found: " + path);
  return path;
}

DataMatrix load_data(const DataArgs& a, const KeyValueConfig& cfg) {
  const auto matrix_path = resolve_path(a.matrix, cfg, "matrix", true);
  auto schema = SchemaConfig::from_config(cfg);
  if (!a.target.empty()) schema.target_column = a.target;
  if (schema.target_column.empty()) throw UsageError("no target column: pass --target or set target_column");
  return load_matrix(matrix_path, schema);
}

std::optional<TargetTimeSeries> load_series(const DataArgs& a, const KeyValueConfig& cfg,
                                            const DataMatrix* matrix, std::ostream& err) {
  const auto path = resolve_path(a.timeseries, cfg, "timeseries", false);
  if (path.empty()) return std::nullopt;
  auto loaded = load_timeseries(path, matrix);
  std::size_t clamped = 0;
  for (const auto& [fips, n] : loaded.clamp_counts) clamped += n;
  if (clamped) err << "warning: " << clamped << " decreasing series values clamped\n";
  if (!loaded.unmatched_fips.empty()) {
    err << "warning: " << loaded.unmatched_fips.size()
        << " series counties are not in the matrix\n";
  }
  return std::move(loaded.series);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } else {
      std::size_t used = 0;
      const long long v = std::stoll(text, &used);
      if (used != text.size() || v < 0) throw std::invalid_argument(text);
      return static_cast<T>(v);
    }
  } catch (const std::exception&) {
    throw UsageError("config key " + key + ": invalid value '" + text + "'");
  }
}

MiningConfig mining_config(const MineArgs& a, const KeyValueConfig& cfg) {
  MiningConfig c;
  auto pick = [&](auto& field, const auto& flag, const std::string& key) {
    using T = std::decay_t<decltype(field)>;
    if (flag) {
      field = static_cast<T>(*flag);
    } else if (const auto v = cfg.get(key)) {
      field = parse_value<T>(key, *v);
    }
  };
  pick(c.min_support, a.min_support, "min_support");
  pick(c.alpha, a.alpha, "alpha");
  pick(c.max_depth, a.max_depth, "max_depth");
  pick(c.bins_per_feature, a.bins, "bins_per_feature");
  pick(c.max_merge_run, a.max_merge_run, "max_merge_run");
  pick(c.threads, a.threads, "threads");
  const auto direction = a.direction ? a.direction : cfg.get("direction");
  try {
    if (direction) c.direction = parse_direction_mode(*direction);
    c.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

int cmd_mine(const MineArgs& a, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(a.data);
  const auto config = mining_config(a, cfg);
  const std::string out_path = a.out.empty() ? cfg.get_or("store", "") : a.out;
  if (out_path.empty()) throw UsageError("--out is required");
  const auto matrix = load_data(a.data, cfg);

  MiningReport report;
  const auto set = mine(matrix, config, &report);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  save_pattern_set(set, out_path);

  std::map<std::size_t, std::size_t> by_depth;
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t i = 0; i < set.patterns.size(); ++i) {
    const auto& p = set.patterns[i];
    ++by_depth[p.constraints.size()];
    lo = i ? std::min(lo, p.mean_target) : p.mean_target;
    hi = i ? std::max(hi, p.mean_target) : p.mean_target;
  }
  out << set.patterns.size() << " patterns";
  if (!set.patterns.empty()) {
    out << " (";
    bool first = true;
    for (const auto& [depth, n] : by_depth) {
      out << (first ? "" : ", ") << "depth " << depth << ": " << n;
      first = false;
    }
    out << ")\nmean " << matrix.target_name() << " min " << format_number(lo) << ", max "
        << format_number(hi) << " (global " << format_number(set.global_target_mean) << ")";
  }
  out << "\n";
  out << "items " << report.items << ", frequent itemsets " << report.frequent_itemsets
      << ", tested " << report.tested << ", significant " << report.significant
      << ", pruned as redundant " << report.pruned_redundant << "\n";
  char runtime[64];
  std::snprintf(runtime, sizeof runtime, "runtime %.2f s\n", report.seconds);
  out << runtime << "wrote " << out_path << "\n";
  return kExitOk;
}

std::shared_ptr<const api::Context> load_context(const DataArgs& data, const std::string& store,
                                                 std::ostream& err) {
  const auto cfg = load_config(data);
  const auto store_path = resolve_path(store, cfg, "store", true);
  auto set = load_pattern_set(store_path);
  auto matrix = load_data(data, cfg);
  auto series = load_series(data, cfg, &matrix, err);
  auto ctx = std::make_shared<api::Context>(std::move(matrix), std::move(set), std::move(series));
  for (const auto& w : ctx->warnings) err << "warning: " << w << "\n";
  return ctx;
}

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  const auto cfg = load_config(a.data);
  auto ctx = load_context(a.data, a.store, err);

  ServerOptions opts;
  opts.host = a.host;
  opts.port = a.port;
  opts.cors = !a.no_cors;
  const std::string geo = a.geojson.empty() ? cfg.get_or("geojson", "") : a.geojson;
  if (!geo.empty()) opts.geojson_path = geo;
  Server server(ctx, opts);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  const int port = server.bind();
  out << "listening on http://" << a.host << ":" << port << std::endl;
  std::thread worker([&] { server.run(); });
  int sig = 0;
  sigwait(&signals, &sig);
  server.stop();
  worker.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "stopped" << std::endl;
  return kExitOk;
}

Date parse_date_arg(const std::string& flag, const std::string& text) {
  try {
    return parse_date(text);
  } catch (const Error& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  const Date t0 = parse_date_arg("--t0", a.t0);
  const Date t1 = parse_date_arg("--t1", a.t1);
  if (!(t0 < t1)) throw UsageError("--t0 must be earlier than --t1");
  const auto cfg = load_config(a.data);
  const auto store_path = resolve_path(a.store, cfg, "store", true);
  const auto series_path = resolve_path(a.data.timeseries, cfg, "timeseries", true);

  const auto set = load_pattern_set(store_path);
  const auto loaded = load_timeseries(series_path);
  for (const auto& [fips, n] : loaded.clamp_counts) {
    if (n) err << "warning: " << fips << ": " << n << " decreasing values clamped\n";
  }
  const auto report = evaluate_growth(set, loaded.series, t0, t1, a.threshold);
  out << format_growth_table(report);
  if (a.floor) {
    for (const auto& entry : newly_affected(set, loaded.series, t0, t1, *a.floor)) {
      out << "newly affected " << entry.id << ":";
      for (const auto& fips : entry.fips) out << " " << fips;
      out << "\n";
    }
  }
  if (!a.json_out.empty()) {
    std::ofstream json(a.json_out);
    if (!json) throw Error("cannot write " + a.json_out);
    json << to_json(report).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_inspect(const InspectArgs& a, std::ostream& out, std::ostream& err) {
  if (a.pattern.empty() == a.county.empty()) {
    throw UsageError("pass exactly one of --pattern or --county");
  }
  const auto ctx = load_context(a.data, a.store, err);
  const auto payload = a.pattern.empty() ? api::county_profile(*ctx, a.county)
                                         : api::pattern(*ctx, a.pattern);
  if (a.json) {
    out << payload.dump(2) << "\n";
  } else {
    out << (a.pattern.empty() ? api::format_county_panel(payload)
                              : api::format_pattern_panel(payload));
  }
  return kExitOk;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  synthetic::PlantedOptions opts;
  opts.counties = a.counties;
  opts.features = a.features;
  opts.seed = a.seed;
  opts.shuffle_target = a.shuffle;
  opts.cells.clear();
  for (std::size_t c = 0; c < a.cells; ++c) opts.cells.push_back({3 * c, 3 * c + 1, 3 * c + 2});
  const auto data = synthetic::generate_planted(opts);

  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  write_text(dir / "matrix.csv", to_canonical_csv(data.matrix));
  write_text(dir / "schema.cfg", "target_column = target\n");
  out << "wrote " << (dir / "matrix.csv").string() << " (" << data.matrix.county_count()
      << " counties, " << data.matrix.feature_count() << " features)\n";
  for (const auto& cell : data.cells) {
    out << "planted cell on features";
    for (const auto f : cell.features) out << " " << data.matrix.feature(f).name;
    out << ": " << cell.rows.size() << " counties\n";
  }

  if (a.growth) {
    std::vector<std::size_t> members;
    for (const auto& cell : data.cells) members.insert(members.end(), cell.rows.begin(), cell.rows.end());
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    synthetic::GrowthOptions g;
    for (const char* d : {"2020-04-01", "2020-05-01", "2020-06-01", "2020-07-01"}) {
      g.dates.push_back(parse_date(d));
    }
    const auto ts = synthetic::generate_growth(data.matrix, members, g);
    std::string csv = "fips";
    for (const auto d : ts.dates) csv += "," + format_date(d);
    csv += "\n";
    for (const auto& [fips, values] : ts.series) {
      csv += fips;
      for (const double v : values) csv += "," + format_number(v);
      csv += "\n";
    }
    write_text(dir / "timeseries.csv", csv);
    out << "wrote " << (dir / "timeseries.csv").string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Risk pattern mining over county-level data"};
  app.name("riskpat");
  app.require_subcommand(1);

  MineArgs mine_args;
  auto* mine_cmd = app.add_subcommand("mine", "mine risk patterns and write a pattern store");
  add_data_flags(mine_cmd, mine_args.data, false);
  mine_cmd->add_option("--out", mine_args.out, "pattern store to write");
  mine_cmd->add_option("--min-support", mine_args.min_support, "minimum member count");
  mine_cmd->add_option("--alpha", mine_args.alpha, "significance level on adjusted p-values");
  mine_cmd->add_option("--max-depth", mine_args.max_depth, "maximum constraints per pattern");
  mine_cmd->add_option("--bins", mine_args.bins, "base bins per feature");
  mine_cmd->add_option("--max-merge-run", mine_args.max_merge_run, "adjacent bins per item");
  mine_cmd->add_option("--direction", mine_args.direction, "high, low or both")
      ->check(CLI::IsMember({"high", "low", "both"}));
  mine_cmd->add_option("--threads", mine_args.threads, "worker threads (0 = all cores)");

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "serve the read-only HTTP API");
  add_data_flags(serve_cmd, serve_args.data, true);
  serve_cmd->add_option("--store", serve_args.store, "pattern store")->check(CLI::ExistingFile);
  serve_cmd->add_option("--geojson", serve_args.geojson, "county geometry (GeoJSON)");
  serve_cmd->add_option("--host", serve_args.host, "listen address");
  serve_cmd->add_option("--port", serve_args.port, "listen port (0 = any free port)")
      ->check(CLI::Range(0, 65535));
  serve_cmd->add_flag("--no-cors", serve_args.no_cors, "omit cross-origin headers");

  EvaluateArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "backtest pattern members' target growth");
  add_data_flags(eval_cmd, eval_args.data, true);
  eval_cmd->add_option("--store", eval_args.store, "pattern store")->check(CLI::ExistingFile);
  eval_cmd->add_option("--t0", eval_args.t0, "window start (YYYY-MM-DD)")->required();
  eval_cmd->add_option("--t1", eval_args.t1, "window end (YYYY-MM-DD)")->required();
  eval_cmd->add_option("--threshold", eval_args.threshold, "ratio threshold for the share");
  eval_cmd->add_option("--floor", eval_args.floor, "list members crossing this value");
  eval_cmd->add_option("--json", eval_args.json_out, "also write the report as JSON");

  InspectArgs inspect_args;
  auto* inspect_cmd = app.add_subcommand("inspect", "print a pattern or county panel as text");
  add_data_flags(inspect_cmd, inspect_args.data, true);
  inspect_cmd->add_option("--store", inspect_args.store, "pattern store")
      ->check(CLI::ExistingFile);
  auto* pattern_opt = inspect_cmd->add_option("--pattern", inspect_args.pattern, "pattern id");
  auto* county_opt = inspect_cmd->add_option("--county", inspect_args.county, "county fips");
  pattern_opt->excludes(county_opt);
  inspect_cmd->add_flag("--json", inspect_args.json, "print the API payload instead");

  SynthArgs synth_args;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset with planted cells");
  synth_cmd->add_option("--out-dir", synth_args.out_dir, "output directory")->required();
  synth_cmd->add_option("--counties", synth_args.counties, "county count");
  synth_cmd->add_option("--features", synth_args.features, "feature count");
  synth_cmd->add_option("--cells", synth_args.cells, "planted 3-feature cells");
  synth_cmd->add_option("--seed", synth_args.seed, "random seed");
  synth_cmd->add_flag("--shuffle", synth_args.shuffle, "shuffle targets (null data)");
  synth_cmd->add_flag("--growth", synth_args.growth, "also write a growth time series");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*mine_cmd) return cmd_mine(mine_args, out, err);
    if (*serve_cmd) return cmd_serve(serve_args, out, err);
    if (*eval_cmd) return cmd_evaluate(eval_args, out, err);
    if (*inspect_cmd) return cmd_inspect(inspect_args, out, err);
    if (*synth_cmd) {
      if (synth_args.cells * 3 > synth_args.features) {
        throw UsageError("--cells needs three features per cell");
      }
      return cmd_synth(synth_args, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace riskpat::cli
