#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "riskpat/dataset.hpp"
#include "riskpat/error.hpp"

using namespace riskpat;

namespace {

SchemaConfig schema_for(const std::string& target) {
  SchemaConfig s;
  s.target_column = target;
  return s;
}

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(RISKPAT_FIXTURES) + "/" + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

DataMatrix fixture_matrix() {
  return load_matrix(std::string(RISKPAT_FIXTURES) + "/matrix.csv",
                     SchemaConfig::from_config(
                         KeyValueConfig::load(std::string(RISKPAT_FIXTURES) + "/schema.cfg")));
}

}  // namespace

TEST(ParseNumericCell, AcceptsDecimalAndScientific) {
  bool missing = false;
  EXPECT_DOUBLE_EQ(*parse_numeric_cell("37.6", missing), 37.6);
  EXPECT_DOUBLE_EQ(*parse_numeric_cell("-1.5e3", missing), -1500.0);
  EXPECT_DOUBLE_EQ(*parse_numeric_cell("+2", missing), 2.0);
  EXPECT_DOUBLE_EQ(*parse_numeric_cell(" 4 ", missing), 4.0);
  EXPECT_FALSE(missing);
}

TEST(ParseNumericCell, EmptyAndNaAreMissing) {
  bool missing = false;
  EXPECT_FALSE(parse_numeric_cell("", missing));
  EXPECT_TRUE(missing);
  EXPECT_FALSE(parse_numeric_cell("NA", missing));
  EXPECT_TRUE(missing);
}

TEST(ParseNumericCell, RejectsGarbageAndNonFinite) {
  for (const char* bad : {"abc", "1.2.3", "nan", "inf", "12x", "+"}) {
    bool missing = true;
    EXPECT_FALSE(parse_numeric_cell(bad, missing)) << bad;
    EXPECT_FALSE(missing) << bad;
  }
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(format_number(37.6), "37.6");
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(4.0), "4");
  EXPECT_EQ(format_number(kMissing), "");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    bool missing = false;
    EXPECT_EQ(*parse_numeric_cell(format_number(v), missing), v);
  }
}

TEST(LoadMatrix, MinimalInput) {
  const auto m = parse_matrix(
      "fips,name,state,poverty,deaths_per_100k\n"
      "1001,Autauga,AL,12.5,3\n01003,Baldwin,AL,9.1,\n01005,Barbour,AL,26.7,10\n",
      schema_for("deaths_per_100k"));
  EXPECT_EQ(m.feature_count(), 1u);
  EXPECT_EQ(m.county_count(), 3u);
  EXPECT_EQ(m.county(0).fips, "01001");
  EXPECT_EQ(m.feature(0).name, "poverty");
  EXPECT_TRUE(is_missing(m.target()[1]));
  EXPECT_DOUBLE_EQ(m.global_target_mean(), 6.5);
  EXPECT_EQ(m.target_count(), 2u);
}

TEST(LoadMatrix, DuplicateFipsNamed) {
  const auto msg = error_of([] {
    parse_matrix("fips,x,t\n06037,1,1\n06037,2,2\n06001,3,3\n", schema_for("t"));
  });
  EXPECT_NE(msg.find("duplicate fips"), std::string::npos);
  EXPECT_NE(msg.find("06037"), std::string::npos);
}

TEST(LoadMatrix, NonNumericCellReportsRowAndColumn) {
  const auto msg = error_of([] { parse_matrix("fips,x,t\n1,1,1\n2,oops,2\n", schema_for("t")); });
  EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("'x'"), std::string::npos) << msg;
}

TEST(LoadMatrix, RejectsEntirelyMissingTarget) {
  const auto msg = error_of([] { parse_matrix("fips,x,t\n1,1,\n2,2,NA\n", schema_for("t")); });
  EXPECT_NE(msg.find("entirely missing"), std::string::npos);
}

TEST(LoadMatrix, RejectsStructuralProblems) {
  EXPECT_THROW(parse_matrix("fips,x,t\n1,1\n", schema_for("t")), Error);
  EXPECT_THROW(parse_matrix("fips,x,t\n123456,1,1\n", schema_for("t")), Error);
  EXPECT_THROW(parse_matrix("fips,x,t\n1,1,1\n", schema_for("missing")), Error);
  EXPECT_THROW(parse_matrix("fips,x,t\n1,1,1\n", SchemaConfig{}), Error);
  EXPECT_THROW(load_matrix("/nonexistent/matrix.csv", schema_for("t")), Error);
}

TEST(LoadMatrix, ExcludedColumnsAndKinds) {
  SchemaConfig s = schema_for("t");
  s.exclude_columns = {"notes"};
  const auto m = parse_matrix(
      "fips,notes,flag,const,x,t\n1,a,0,5,1.5,1\n2,b,1,5,2.5,0\n3,c,1,5,NA,1\n", s);
  ASSERT_EQ(m.feature_count(), 3u);
  EXPECT_EQ(m.feature(0).kind, FeatureKind::binary);
  EXPECT_TRUE(m.feature(1).constant);
  EXPECT_EQ(m.feature(2).kind, FeatureKind::numeric);
  EXPECT_FALSE(m.feature(2).constant);
  EXPECT_TRUE(m.binary_target());
}

TEST(LoadMatrix, FixtureFingerprintMatchesIndependentComputation) {
  const auto m = fixture_matrix();
  const auto expected = nlohmann::json::parse(read_fixture("expected.json"));
  EXPECT_EQ(dataset_fingerprint(m), expected.at("dataset_fingerprint").get<std::string>());
  EXPECT_EQ(to_canonical_csv(m), read_fixture("matrix.csv"));
  EXPECT_EQ(m.feature(*m.find_feature("avg. GPA")).units, "grade points");
}

TEST(CanonicalCsv, RoundTripIsCellExact) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 100.0);
  std::string text = "fips,name,state,a,b,c,t\n";
  for (int r = 0; r < 50; ++r) {
    text += std::to_string(1000 + r) + ",\"County, " + std::to_string(r) + "\",S" +
            std::to_string(r % 3);
    for (int c = 0; c < 4; ++c) {
      text += ",";
      if ((r + c) % 7 != 0) text += format_number(normal(rng));
    }
    text += "\n";
  }
  const auto m = parse_matrix(text, schema_for("t"));
  const auto reloaded = parse_matrix(to_canonical_csv(m), canonical_schema(m));
  EXPECT_TRUE(m == reloaded);
  EXPECT_EQ(dataset_fingerprint(m), dataset_fingerprint(reloaded));
}

TEST(Timeseries, MonotoneSeriesUnchanged) {
  const auto load =
      parse_timeseries("fips,2020-04-01,2020-05-01,2020-06-01,2020-07-01\n09003,0,5,5,12\n");
  EXPECT_EQ(*load.series.find("09003"), (std::vector<double>{0, 5, 5, 12}));
  EXPECT_EQ(load.clamp_counts.at("09003"), 0u);
}

TEST(Timeseries, DecreasingEntriesClamped) {
  const auto load =
      parse_timeseries("fips,2020-04-01,2020-05-01,2020-06-01,2020-07-01\n09003,0,5,4,12\n");
  EXPECT_EQ(*load.series.find("09003"), (std::vector<double>{0, 5, 5, 12}));
  EXPECT_EQ(load.clamp_counts.at("09003"), 1u);
}

TEST(Timeseries, ClampingNeverDropsBelowRunningMax) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> u(0, 50);
  std::string text = "fips";
  for (int d = 1; d <= 20; ++d) text += ",2020-01-" + std::string(d < 10 ? "0" : "") + std::to_string(d);
  text += "\n";
  std::vector<std::vector<int>> raw;
  for (int r = 0; r < 30; ++r) {
    raw.emplace_back();
    text += std::to_string(r + 1);
    for (int d = 0; d < 20; ++d) {
      raw.back().push_back(u(rng));
      text += "," + std::to_string(raw.back().back());
    }
    text += "\n";
  }
  const auto load = parse_timeseries(text);
  for (int r = 0; r < 30; ++r) {
    char fips[8];
    std::snprintf(fips, sizeof fips, "%05d", r + 1);
    const auto& s = *load.series.find(fips);
    int running = 0;
    for (int d = 0; d < 20; ++d) {
      running = std::max(running, raw[r][d]);
      EXPECT_EQ(s[d], running);
    }
  }
}

TEST(Timeseries, MissingCellsCarryForward) {
  const auto load = parse_timeseries("fips,2020-04-01,2020-05-01,2020-06-01\n1,3,,7\n");
  EXPECT_EQ(*load.series.find("00001"), (std::vector<double>{3, 3, 7}));
}

TEST(Timeseries, RejectsBadInput) {
  const auto msg = error_of([] { parse_timeseries(""); });
  EXPECT_EQ(msg, "no date columns");
  EXPECT_EQ(error_of([] { parse_timeseries("fips\n1\n"); }), "no date columns");
  EXPECT_THROW(parse_timeseries("fips,April\n1,2\n"), Error);
  EXPECT_THROW(parse_timeseries("fips,2020-02-30\n1,2\n"), Error);
  EXPECT_THROW(parse_timeseries("fips,2020-05-01,2020-04-01\n1,2,3\n"), Error);
  EXPECT_THROW(parse_timeseries("fips,2020-04-01\n1,x\n"), Error);
}

TEST(Timeseries, UnknownFipsKeptButFlagged) {
  const auto m = fixture_matrix();
  const auto load = parse_timeseries("fips,2020-04-01\n09003,1\n99999,2\n", &m);
  EXPECT_TRUE(load.series.find("99999"));
  EXPECT_EQ(load.unmatched_fips, (std::vector<std::string>{"99999"}));
}

TEST(Timeseries, SnapIndexPicksLastEarlierDate) {
  const auto load = parse_timeseries("fips,2020-04-01,2020-05-01\n1,1,2\n");
  EXPECT_FALSE(load.series.snap_index(parse_date("2020-03-31")));
  EXPECT_EQ(*load.series.snap_index(parse_date("2020-04-01")), 0u);
  EXPECT_EQ(*load.series.snap_index(parse_date("2020-04-30")), 0u);
  EXPECT_EQ(*load.series.snap_index(parse_date("2021-01-01")), 1u);
}

TEST(Dates, ParseAndFormat) {
  EXPECT_EQ(format_date(parse_date("2020-05-01")), "2020-05-01");
  EXPECT_THROW(parse_date("2020-5-1"), Error);
  EXPECT_THROW(parse_date("2020-13-01"), Error);
}

TEST(GlobalStats, FixtureRanges) {
  const auto m = fixture_matrix();
  const auto gs = global_stats(m);
  const auto minority = *m.find_feature("% minority population");
  const auto gpa = *m.find_feature("avg. GPA");
  EXPECT_EQ(*gs.features[minority].range, (ValueRange{0.0, 99.2}));
  EXPECT_EQ(*gs.features[gpa].range, (ValueRange{0.0, 4.0}));
  EXPECT_EQ(*gs.state_range("CT", gpa), (ValueRange{2.4, 3.7}));
  EXPECT_FALSE(gs.state_range("ZZ", gpa));
  EXPECT_DOUBLE_EQ(gs.features[gpa].mean, (2.9 + 2.4 + 3.7 + 0.0 + 4.0) / 5.0);
  EXPECT_DOUBLE_EQ(gs.global_target_mean, 92.5);
}

TEST(GlobalStats, SingleCountyDegenerateRanges) {
  const auto m = parse_matrix("fips,state,a,b,t\n1,AL,3,7,1\n", schema_for("t"));
  const auto gs = global_stats(m);
  EXPECT_EQ(*gs.features[0].range, (ValueRange{3, 3}));
  EXPECT_EQ(*gs.features[1].range, (ValueRange{7, 7}));
}

TEST(GlobalStats, RangesBracketEveryValue) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  std::string text = "fips,state,a,b,c,t\n";
  for (int r = 0; r < 200; ++r) {
    text += std::to_string(r + 1) + ",S" + std::to_string(r % 7);
    for (int c = 0; c < 3; ++c) text += "," + ((r * 3 + c) % 11 ? format_number(normal(rng)) : "");
    text += ",1\n";
  }
  const auto m = parse_matrix(text, schema_for("t"));
  const auto gs = global_stats(m);
  for (std::size_t f = 0; f < m.feature_count(); ++f) {
    for (std::size_t r = 0; r < m.county_count(); ++r) {
      const double v = m.value(r, f);
      if (is_missing(v)) continue;
      EXPECT_TRUE(gs.features[f].range->contains(v));
      EXPECT_TRUE(gs.state_range(m.county(r).state, f)->contains(v));
    }
  }
}
