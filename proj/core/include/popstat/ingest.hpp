#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popstat/config.hpp"
#include "popstat/pyramid.hpp"
#include "popstat/types.hpp"

namespace popstat {

// ---------------------------------------------------------------------------
// Population prospects
// ---------------------------------------------------------------------------

/// Column mapping for a population file. Empty names are auto-detected from
/// the header: WPP "wide" files (ISO3_code, Location, Time, AgeGrp, PopMale,
/// PopFemale, LocTypeName) and "long" files (country_code, country_name,
/// year, sex, age_group, count) both work without configuration.
struct PopulationColumns {
  char delimiter = ',';
  std::string code;
  std::string name;
  std::string year;
  std::string age_group;
  std::string sex;     // long format
  std::string count;   // long format
  std::string male;    // wide format
  std::string female;  // wide format
  std::string location_type;
  std::string location_type_value = "Country/Area";
  std::string variant;
  std::string variant_value;

  /// Reads the [population] section.
  static PopulationColumns from_config(const KeyValueConfig& config);
};

struct PopulationExtract {
  std::vector<RawPopulationRow> rows;
  /// Locations skipped because they are aggregates or unresolvable names.
  std::vector<std::string> skipped_locations;
};

/// Rows of `year` for every country in the file. Regions and other
/// aggregates (blank code, non-country location type, unknown name) are
/// skipped. Throws ParseError (with line) on a bad row of the requested year
/// and SchemaError when a required column is missing.
PopulationExtract parse_population(std::istream& in, int year,
                                   const PopulationColumns& columns = {});

// ---------------------------------------------------------------------------
// COVID surveillance
// ---------------------------------------------------------------------------

struct OutcomeRecord {
  CountryCode country_code;
  double cases_per_million = 0.0;   // NaN when no observation <= cutoff
  double deaths_per_million = 0.0;  // NaN when no observation <= cutoff
  Date as_of;

  friend bool operator==(const OutcomeRecord&, const OutcomeRecord&) = default;
};

struct OutcomeColumns {
  char delimiter = ',';
  std::string code = "iso_code";
  std::string date = "date";
  std::string cases = "total_cases_per_million";
  std::string deaths = "total_deaths_per_million";
  /// Extra codes to drop on top of the OWID_ prefix rule.
  std::vector<std::string> denylist;

  static OutcomeColumns from_config(const KeyValueConfig& config);
};

struct OutcomeTable {
  std::map<CountryCode, OutcomeRecord> records;
  std::vector<Exclusion> exclusions;
  /// Observations where a cumulative series decreased (source revisions).
  std::size_t non_monotone_steps = 0;
};

/// Last non-missing cumulative value at a date <= cutoff, per country and
/// per series. Aggregate codes ("OWID_" prefix, denylist) are dropped.
OutcomeTable parse_outcomes(std::istream& in, Date cutoff, const OutcomeColumns& columns = {});

// ---------------------------------------------------------------------------
// Socio-economic indicators
// ---------------------------------------------------------------------------

struct IndicatorTable {
  std::string indicator_name;
  int year = 2019;
  std::map<CountryCode, double> values;
};

struct IndicatorColumns {
  char delimiter = ',';
  std::string code = "code";
  /// Used instead of `code` when set: resolves names via the alias table.
  std::string name;
  std::string value = "value";
  /// Optional filter; rows whose year differs are ignored.
  std::string year;
  int year_value = 2019;

  /// Reads [indicator.<name>] (falling back to [indicators]).
  static IndicatorColumns from_config(const KeyValueConfig& config, const std::string& indicator);
};

/// The eight benchmark indicators, in report order.
const std::vector<std::string>& standard_indicator_names();

/// Numeric cells only; blanks and ".."/"NA" are dropped. A non-numeric cell
/// is a ParseError naming the country; a duplicate code is an Error.
IndicatorTable parse_indicator(std::istream& in, const std::string& indicator_name,
                               const IndicatorColumns& columns = {});

// ---------------------------------------------------------------------------
// Join
// ---------------------------------------------------------------------------

struct JoinedDataset {
  std::vector<CountryCode> countries;  // sorted
  PyramidMap pyramids;
  std::map<CountryCode, OutcomeRecord> outcomes;
  std::vector<IndicatorTable> indicators;
  std::vector<Exclusion> exclusions;  // sorted by code

  bool has_indicators() const noexcept { return !indicators.empty(); }
};

/// Intersection of pyramid and outcome keys. Every other key becomes an
/// exclusion ("no outcome" / "no pyramid"). Throws DegenerateInput when the
/// intersection is empty.
JoinedDataset join(const PyramidMap& pyramids, const std::map<CountryCode, OutcomeRecord>& outcomes,
                   std::vector<IndicatorTable> indicators = {});

/// Tab-separated `CODE<TAB>reason` lines.
std::string exclusions_to_tsv(const std::vector<Exclusion>& exclusions);

}  // namespace popstat
