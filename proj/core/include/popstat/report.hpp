#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popstat/ingest.hpp"
#include "popstat/stats.hpp"
#include "popstat/tuning.hpp"

namespace popstat {

/// One indicator's correlation with both log outcomes. A cell is empty when
/// fewer than three countries overlap or the data are degenerate.
struct BenchmarkRow {
  std::string indicator_name;
  std::optional<CorrelationResult> cases;
  std::optional<CorrelationResult> deaths;
};

inline constexpr std::string_view kPopStatRowName = "PoPStat-COVID19";

/// Correlates each indicator (x) with each log outcome (y) over the
/// countries present in both, then appends the PoPStat row. Throws when
/// `indicators` is empty.
std::vector<BenchmarkRow> benchmark(const std::vector<IndicatorTable>& indicators,
                                    const LogOutcomeVector& log_cases,
                                    const LogOutcomeVector& log_deaths,
                                    const std::optional<CorrelationResult>& popstat_cases,
                                    const std::optional<CorrelationResult>& popstat_deaths);

struct ScatterPoint {
  CountryCode code;
  double x = 0.0;
  double y = 0.0;
};

/// Plot-ready data for one scatter panel with its OLS line.
struct ScatterSeries {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ScatterPoint> points;
  OlsFit fit;
};

/// Throws DegenerateInput on an empty or zero-variance series.
ScatterSeries make_scatter(std::string title, std::string x_label, std::string y_label,
                           const AlignedSeries& series);

std::string scatter_to_json(const ScatterSeries& series);

/// Writes scatter_to_json() to `path`; I/O errors carry the path.
void emit_scatter(const ScatterSeries& series, const std::filesystem::path& path);

/// A reference value the run is compared against. `row` is an indicator
/// name, kPopStatRowName, or a reference country code.
struct ExpectedCell {
  std::string row;
  std::string outcome;  // "cases" | "deaths"
  double r = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  double tolerance = 0.01;
};

struct ExpectedCheck {
  ExpectedCell expected;
  std::optional<CorrelationResult> actual;
  bool within_tolerance = false;
};

/// Reads `row,outcome,r,ci_low,ci_high,tolerance` (CI columns may be blank).
std::vector<ExpectedCell> parse_expected_cells(std::istream& in);

struct RunMetadata {
  std::string cutoff;
  int year = 2019;
  double epsilon = kDefaultEpsilon;
  BinSchema schema = BinSchema::joint_42;
  std::size_t n_countries = 0;
  std::string population_variant = "estimates";
  std::vector<std::string> warnings;
  /// Resolved configuration echoed for reproducibility.
  std::map<std::string, std::string> config;
};

struct ReportInputs {
  RunMetadata metadata;
  std::optional<TuningResult> tuning;
  std::optional<CountryCode> popstat_reference_cases;
  std::optional<CountryCode> popstat_reference_deaths;
  std::optional<CorrelationResult> popstat_cases;
  std::optional<CorrelationResult> popstat_deaths;
  std::optional<RobustnessTable> robustness;
  std::optional<std::vector<BenchmarkRow>> benchmark;
  std::vector<Exclusion> exclusions;
  std::vector<Exclusion> dropped_cases;
  std::vector<Exclusion> dropped_deaths;
  std::vector<ExpectedCell> expected;
};

/// Looks up each expected cell among the benchmark rows and robustness
/// entries of `inputs`.
std::vector<ExpectedCheck> check_expected(const ReportInputs& inputs);

/// "<0.001" below 0.001, three decimals below 0.01, otherwise two.
std::string format_p(double p);

/// Fixed-point with `digits` decimals; never prints "-0.00".
std::string format_fixed(double v, int digits);

/// Markdown report: run metadata, tuning, PoPStat, robustness and benchmark
/// sections plus the exclusion lists.
std::string render_report(const ReportInputs& inputs);

/// Machine-readable counterpart; top-level keys tuning, robustness,
/// benchmark, metadata.
std::string results_json(const ReportInputs& inputs);

}  // namespace popstat
