#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "popstat/error.hpp"
#include "popstat/pipeline.hpp"

using namespace popstat;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = POPSTAT_FIXTURE_DIR;
const fs::path kGolden = POPSTAT_GOLDEN_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig fixture_config(const std::string& out_name) {
  CliOverrides cli;
  cli.population = kFixture / "population.csv";
  cli.outcomes = kFixture / "outcomes.csv";
  cli.indicators_dir = kFixture / "indicators";
  cli.output_dir = fs::temp_directory_path() / ("popstat_pipeline_" + out_name);
  cli.k = 3;
  fs::remove_all(*cli.output_dir);
  return resolve_config(cli);
}

// results.json without the entries that embed machine-specific paths.
nlohmann::json portable(const fs::path& results) {
  auto doc = nlohmann::json::parse(slurp(results));
  doc["metadata"].erase("config");
  doc["metadata"].erase("warnings");
  return doc;
}

// Structural equality with numbers compared to an absolute tolerance.
void expect_json_near(const nlohmann::json& expected, const nlohmann::json& actual,
                      const std::string& path = "") {
  if (expected.is_number_float() || actual.is_number_float()) {
    ASSERT_TRUE(actual.is_number()) << path;
    EXPECT_NEAR(actual.get<double>(), expected.get<double>(), 1e-12) << path;
    return;
  }
  ASSERT_EQ(expected.type(), actual.type()) << path;
  if (expected.is_object()) {
    ASSERT_EQ(expected.size(), actual.size()) << path;
    for (const auto& [key, value] : expected.items()) {
      ASSERT_TRUE(actual.contains(key)) << path << "/" << key;
      expect_json_near(value, actual[key], path + "/" + key);
    }
  } else if (expected.is_array()) {
    ASSERT_EQ(expected.size(), actual.size()) << path;
    for (std::size_t i = 0; i < expected.size(); ++i) {
      expect_json_near(expected[i], actual[i], path + "/" + std::to_string(i));
    }
  } else {
    EXPECT_EQ(expected, actual) << path;
  }
}

}  // namespace

TEST(Config, PrecedenceFlagOverFileOverDefault) {
  std::istringstream text("[run]\ncutoff = 2022-12-31\nyear = 2018\nk = 4\nbins = per_sex_21\n");
  const auto file = KeyValueConfig::parse(text);
  CliOverrides cli;
  cli.year = 2020;
  const auto cfg = resolve_config(file, cli);
  EXPECT_EQ(cfg.year, 2020);
  EXPECT_EQ(cfg.cutoff, "2022-12-31");
  EXPECT_EQ(cfg.k, 4u);
  EXPECT_EQ(cfg.bins, BinSchema::per_sex_21);
  EXPECT_EQ(cfg.epsilon, kDefaultEpsilon);
  EXPECT_EQ(cfg.threads, 1u);

  const auto defaults = resolve_config(KeyValueConfig{}, CliOverrides{});
  EXPECT_EQ(defaults.cutoff, "2023-05-05");
  EXPECT_EQ(defaults.year, 2019);
  EXPECT_EQ(defaults.k, 10u);
  EXPECT_EQ(defaults.bins, BinSchema::joint_42);
}

TEST(Config, InvalidValuesRejected) {
  CliOverrides cli;
  cli.cutoff = "2023-13-01";
  EXPECT_THROW(resolve_config(KeyValueConfig{}, cli), Error);
  cli = {};
  cli.epsilon = 0.0;
  EXPECT_THROW(resolve_config(KeyValueConfig{}, cli), Error);
  cli = {};
  cli.bins = "joint";
  EXPECT_THROW(resolve_config(KeyValueConfig{}, cli), Error);
  cli = {};
  cli.candidates = "MLT,pol";
  EXPECT_THROW(resolve_config(KeyValueConfig{}, cli), Error);
}

TEST(Config, EchoListsResolvedValues) {
  CliOverrides cli;
  cli.candidates = "MLT, POL";
  const auto echo = resolve_config(KeyValueConfig{}, cli).echo();
  EXPECT_EQ(echo.at("candidates"), "MLT,POL");
  EXPECT_EQ(echo.at("epsilon"), "1e-10");
}

TEST(ResolveReference, CodesNamesAndSuggestions) {
  const std::vector<CountryCode> known{CountryCode("MLT"), CountryCode("POL"), CountryCode("JPN")};
  EXPECT_EQ(resolve_reference("MLT", known).str(), "MLT");
  EXPECT_EQ(resolve_reference("Malta", known).str(), "MLT");
  try {
    resolve_reference("MTL", known);
    FAIL();
  } catch (const Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("did you mean"), std::string::npos);
    EXPECT_NE(what.find("MLT"), std::string::npos);
  }
}

TEST(Pipeline, DivergenceCommandWritesSortedLadder) {
  const auto cfg = fixture_config("divergence");
  std::ostringstream log;
  const auto dv = cmd_divergence(cfg, "Malta", log);
  EXPECT_EQ(dv.reference_code.str(), "MLT");
  EXPECT_EQ(dv.values.size(), 9u);
  const auto csv = slurp(cfg.output_dir / "divergence_MLT.csv");
  EXPECT_EQ(csv.rfind("code,divergence\nMLT,", 0), 0u);
  double prev = -1.0;
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    const double v = std::stod(line.substr(4));
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Pipeline, FullRunWritesEveryArtifact) {
  const auto cfg = fixture_config("run");
  std::ostringstream log;
  ASSERT_EQ(cmd_run(cfg, log), 0) << log.str();
  for (const char* f : {"report.md", "results.json", "tuning.csv", "robustness.csv",
                        "exclusions.tsv", "run_status.json", "scatter/popstat_cases.json",
                        "scatter/hdi_deaths.json"}) {
    EXPECT_TRUE(fs::exists(cfg.output_dir / f)) << f;
  }
  const auto status = nlohmann::json::parse(slurp(cfg.output_dir / "run_status.json"));
  EXPECT_EQ(status["status"], "complete");

  const auto exclusions = slurp(cfg.output_dir / "exclusions.tsv");
  EXPECT_NE(exclusions.find("CHE\tno outcome"), std::string::npos);
  EXPECT_NE(exclusions.find("USA\tno pyramid"), std::string::npos);

  const auto doc = nlohmann::json::parse(slurp(cfg.output_dir / "results.json"));
  EXPECT_EQ(doc["metadata"]["n_countries"], 8);
  EXPECT_EQ(doc["benchmark"].back()["indicator"], "PoPStat-COVID19");
  EXPECT_NE(log.str().find("best_cases="), std::string::npos);
}

TEST(Pipeline, RerunIsByteIdentical) {
  const auto a = fixture_config("rerun_a");
  auto b = a;
  b.output_dir = fs::temp_directory_path() / "popstat_pipeline_rerun_b";
  fs::remove_all(b.output_dir);
  b.threads = 3;
  std::ostringstream log;
  ASSERT_EQ(cmd_run(a, log), 0);
  ASSERT_EQ(cmd_run(b, log), 0);
  for (const char* f : {"report.md", "tuning.csv", "robustness.csv", "scatter/popstat_deaths.json"}) {
    EXPECT_EQ(slurp(a.output_dir / f), slurp(b.output_dir / f)) << f;
  }
  EXPECT_EQ(portable(a.output_dir / "results.json"), portable(b.output_dir / "results.json"));
}

TEST(Pipeline, MatchesGoldenResults) {
  const auto cfg = fixture_config("golden");
  std::ostringstream log;
  ASSERT_EQ(cmd_run(cfg, log), 0) << log.str();
  const auto actual = portable(cfg.output_dir / "results.json");
  const auto golden = nlohmann::json::parse(slurp(kGolden / "fixture_results.json"));
  expect_json_near(golden, actual);
}

TEST(Pipeline, FailureRecordsStage) {
  auto cfg = fixture_config("failure");
  cfg.population = kFixture / "no_such_file.csv";
  std::ostringstream log;
  EXPECT_NE(cmd_run(cfg, log), 0);
  const auto status = nlohmann::json::parse(slurp(cfg.output_dir / "run_status.json"));
  EXPECT_EQ(status["status"], "failed");
  EXPECT_EQ(status["stage"], "ingest");
  EXPECT_NE(log.str().find("no_such_file.csv"), std::string::npos);
}

TEST(Pipeline, MissingIndicatorsStillRenders) {
  auto cfg = fixture_config("no_indicators");
  cfg.indicators_dir.clear();
  std::ostringstream log;
  ASSERT_EQ(cmd_run(cfg, log), 0) << log.str();
  const auto doc = nlohmann::json::parse(slurp(cfg.output_dir / "results.json"));
  EXPECT_TRUE(doc["benchmark"].is_null());
  EXPECT_NE(slurp(cfg.output_dir / "report.md").find("_not computed"), std::string::npos);
}

TEST(Pipeline, TuneWithTwoCandidates) {
  auto cfg = fixture_config("two_candidates");
  cfg.candidates = {CountryCode("MLT"), CountryCode("POL")};
  std::ostringstream log;
  const auto result = cmd_tune(cfg, log);
  EXPECT_EQ(result.per_reference.size(), 2u);
  const auto csv = slurp(cfg.output_dir / "tuning.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}
