#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popstat/config.hpp"
#include "popstat/ingest.hpp"
#include "popstat/pyramid.hpp"
#include "popstat/report.hpp"
#include "popstat/stats.hpp"
#include "popstat/tuning.hpp"

namespace popstat {

/// Fully resolved settings for one invocation.
struct RunConfig {
  std::filesystem::path population;
  std::filesystem::path outcomes;
  std::filesystem::path indicators_dir;
  std::filesystem::path expected;  // optional CSV of expected values to compare against
  std::filesystem::path output_dir = "popstat-out";
  std::string cutoff = "2023-05-05";
  int year = 2019;
  double epsilon = kDefaultEpsilon;
  BinSchema bins = BinSchema::joint_42;
  std::vector<CountryCode> candidates;
  std::size_t k = 10;
  unsigned threads = 1;
  /// Column mappings and other per-source settings.
  KeyValueConfig file;

  Date cutoff_date() const;
  TuningOptions tuning_options() const;
  /// Every resolved value as text, for results.json metadata.
  std::map<std::string, std::string> echo() const;
  /// Throws Error on an unparseable cutoff or non-positive epsilon.
  void validate() const;
};

/// Values given on the command line. Unset fields fall back to the config
/// file, then to RunConfig defaults.
struct CliOverrides {
  std::optional<std::filesystem::path> config_file;
  std::optional<std::filesystem::path> population;
  std::optional<std::filesystem::path> outcomes;
  std::optional<std::filesystem::path> indicators_dir;
  std::optional<std::filesystem::path> expected;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::string> cutoff;
  std::optional<int> year;
  std::optional<double> epsilon;
  std::optional<std::string> bins;
  std::optional<std::string> candidates;
  std::optional<std::size_t> k;
  std::optional<unsigned> threads;
};

/// CLI flag > [run] section of the config file > default.
RunConfig resolve_config(const CliOverrides& cli);
RunConfig resolve_config(const KeyValueConfig& file, const CliOverrides& cli);

struct LoadedData {
  JoinedDataset joined;
  LogOutcomeVector log_cases;
  LogOutcomeVector log_deaths;
  std::vector<std::string> warnings;
};

PyramidBuild load_pyramids(const RunConfig& config, std::vector<std::string>* warnings = nullptr);

/// Population + outcomes (+ indicators when `with_indicators`), joined and
/// log-transformed.
LoadedData load_data(const RunConfig& config, bool with_indicators);

/// Indicator files found under indicators_dir. Missing files add a warning.
std::vector<IndicatorTable> load_indicators(const RunConfig& config,
                                            std::vector<std::string>& warnings);

/// Resolves a code or country name against `known`; on failure throws Error
/// listing near matches.
CountryCode resolve_reference(std::string_view text, const std::vector<CountryCode>& known);

/// Each command writes its artifacts under config.output_dir and prints a
/// short summary to `log`.
DivergenceVector cmd_divergence(const RunConfig& config, std::string_view reference,
                                std::ostream& log);
TuningResult cmd_tune(const RunConfig& config, std::ostream& log);

struct PopStatOutcome {
  CountryCode reference_cases;
  CountryCode reference_deaths;
  CorrelationResult cases;
  CorrelationResult deaths;
};
/// Uses `reference` for both outcomes, or the tuned optimum when empty.
PopStatOutcome cmd_popstat(const RunConfig& config, std::optional<std::string> reference,
                           std::ostream& log);
RobustnessTable cmd_robustness(const RunConfig& config, std::ostream& log);
std::vector<BenchmarkRow> cmd_benchmark(const RunConfig& config, std::optional<std::string> reference,
                                        std::ostream& log);

/// ingest -> tune -> popstat -> robustness -> benchmark -> render. Writes
/// report.md, results.json, scatter/*.json, exclusions.tsv and
/// run_status.json (which names the failing stage on error). Returns the
/// process exit code.
int cmd_run(const RunConfig& config, std::ostream& log);

/// Divergence CSV, `code,divergence`, ascending by value then code.
std::string divergence_to_csv(const DivergenceVector& dv);

}  // namespace popstat
