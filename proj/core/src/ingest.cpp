#include "popstat/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "popstat/csv.hpp"
#include "popstat/error.hpp"

namespace popstat {
namespace {

char delimiter_from(const KeyValueConfig& config, std::string_view section) {
  auto d = config.get(section, "delimiter");
  if (!d || d->empty()) return ',';
  if (*d == "\\t" || *d == "tab") return '\t';
  if (d->size() != 1) throw SchemaError(fmt::format("[{}] delimiter must be one character", section));
  return d->front();
}

// Explicit name when configured (must exist), else first candidate present.
std::optional<std::size_t> resolve_column(const csv::Reader& reader, const std::string& configured,
                                          std::initializer_list<std::string_view> candidates,
                                          std::string_view source) {
  if (!configured.empty()) return reader.require_column(configured, source);
  for (auto name : candidates) {
    if (auto idx = reader.find_column(name)) return idx;
  }
  return std::nullopt;
}

std::size_t require(std::optional<std::size_t> idx, std::string_view what, std::string_view source) {
  if (!idx) throw SchemaError(fmt::format("{}: missing required {} column", source, what));
  return *idx;
}

const std::string& cell(const csv::Record& rec, std::size_t idx) {
  static const std::string empty;
  return idx < rec.fields.size() ? rec.fields[idx] : empty;
}

std::optional<int> parse_int(std::string_view text) {
  text = csv::trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

bool is_missing_token(std::string_view text) {
  text = csv::trim(text);
  return text.empty() || text == ".." || text == "NA" || text == "N/A" || text == "NaN" ||
         text == "nan";
}

double parse_count(const csv::Record& rec, std::size_t idx, std::string_view what) {
  auto v = csv::parse_double(cell(rec, idx));
  if (!v || !std::isfinite(*v)) {
    throw ParseError(rec.line, fmt::format("{}: '{}' is not a number", what, cell(rec, idx)));
  }
  if (*v < 0.0) throw ParseError(rec.line, fmt::format("{}: negative count {}", what, *v));
  return *v;
}

}  // namespace

PopulationColumns PopulationColumns::from_config(const KeyValueConfig& config) {
  constexpr std::string_view s = "population";
  PopulationColumns c;
  c.delimiter = delimiter_from(config, s);
  c.code = config.get_or(s, "code_column", "");
  c.name = config.get_or(s, "name_column", "");
  c.year = config.get_or(s, "year_column", "");
  c.age_group = config.get_or(s, "age_column", "");
  c.sex = config.get_or(s, "sex_column", "");
  c.count = config.get_or(s, "count_column", "");
  c.male = config.get_or(s, "male_column", "");
  c.female = config.get_or(s, "female_column", "");
  c.location_type = config.get_or(s, "location_type_column", "");
  c.location_type_value = config.get_or(s, "location_type_value", c.location_type_value);
  c.variant = config.get_or(s, "variant_column", "");
  c.variant_value = config.get_or(s, "variant_value", "");
  return c;
}

PopulationExtract parse_population(std::istream& in, int year, const PopulationColumns& columns) {
  constexpr std::string_view source = "population";
  csv::Reader reader(in, columns.delimiter);

  const auto code_col = resolve_column(reader, columns.code, {"ISO3_code", "country_code", "iso_code", "code"}, source);
  const auto name_col = resolve_column(reader, columns.name, {"Location", "country_name", "country"}, source);
  const auto year_col = require(resolve_column(reader, columns.year, {"Time", "year", "Year"}, source), "year", source);
  const auto age_col = require(resolve_column(reader, columns.age_group, {"AgeGrp", "age_group"}, source), "age group", source);
  const auto sex_col = resolve_column(reader, columns.sex, {"sex", "Sex"}, source);
  const auto count_col = resolve_column(reader, columns.count, {"count", "population", "value"}, source);
  const auto male_col = resolve_column(reader, columns.male, {"PopMale", "male"}, source);
  const auto female_col = resolve_column(reader, columns.female, {"PopFemale", "female"}, source);
  const auto type_col = resolve_column(reader, columns.location_type, {"LocTypeName"}, source);
  const auto variant_col = resolve_column(reader, columns.variant, {}, source);

  if (!code_col && !name_col) {
    throw SchemaError("population: need a country code or country name column");
  }
  const bool long_format = sex_col && count_col;
  const bool wide_format = male_col && female_col;
  if (!long_format && !wide_format) {
    throw SchemaError("population: need either sex+count columns or male+female count columns");
  }

  PopulationExtract out;
  std::set<std::string> skipped;
  while (auto rec = reader.next()) {
    const auto row_year = parse_int(cell(*rec, year_col));
    if (!row_year) {
      throw ParseError(rec->line, fmt::format("year '{}' is not an integer", cell(*rec, year_col)));
    }
    if (*row_year != year) continue;
    if (variant_col && csv::trim(cell(*rec, *variant_col)) != columns.variant_value) continue;

    const std::string name = name_col ? std::string(csv::trim(cell(*rec, *name_col))) : std::string{};
    if (type_col && csv::trim(cell(*rec, *type_col)) != columns.location_type_value) {
      skipped.insert(name);
      continue;
    }

    std::optional<CountryCode> code;
    if (code_col) {
      const auto raw = csv::trim(cell(*rec, *code_col));
      code = CountryCode::parse(raw);
      if (!code) {
        skipped.insert(name.empty() ? std::string(raw) : name);
        continue;
      }
    } else {
      code = code_for_name(name);
      if (!code) {
        skipped.insert(name);
        continue;
      }
    }

    const auto& age_label = cell(*rec, age_col);
    const auto age = age_group_index(age_label);
    if (!age) {
      throw ParseError(rec->line, fmt::format("unknown age group '{}'", csv::trim(age_label)));
    }

    RawPopulationRow row{*code, name, year, Sex::male, *age, 0.0};
    if (long_format) {
      const auto sex = parse_sex(cell(*rec, *sex_col));
      if (!sex) throw ParseError(rec->line, fmt::format("unknown sex '{}'", cell(*rec, *sex_col)));
      row.sex = *sex;
      row.count = parse_count(*rec, *count_col, "count");
      out.rows.push_back(std::move(row));
    } else {
      row.sex = Sex::male;
      row.count = parse_count(*rec, *male_col, "male count");
      out.rows.push_back(row);
      row.sex = Sex::female;
      row.count = parse_count(*rec, *female_col, "female count");
      out.rows.push_back(std::move(row));
    }
  }
  skipped.erase("");
  out.skipped_locations.assign(skipped.begin(), skipped.end());
  return out;
}

OutcomeColumns OutcomeColumns::from_config(const KeyValueConfig& config) {
  constexpr std::string_view s = "outcomes";
  OutcomeColumns c;
  c.delimiter = delimiter_from(config, s);
  c.code = config.get_or(s, "code_column", c.code);
  c.date = config.get_or(s, "date_column", c.date);
  c.cases = config.get_or(s, "cases_column", c.cases);
  c.deaths = config.get_or(s, "deaths_column", c.deaths);
  c.denylist = config.get_list(s, "denylist");
  return c;
}

OutcomeTable parse_outcomes(std::istream& in, Date cutoff, const OutcomeColumns& columns) {
  constexpr std::string_view source = "outcomes";
  csv::Reader reader(in, columns.delimiter);
  const auto code_col = reader.require_column(columns.code, source);
  const auto date_col = reader.require_column(columns.date, source);
  const auto cases_col = reader.require_column(columns.cases, source);
  const auto deaths_col = reader.require_column(columns.deaths, source);
  const std::set<std::string, std::less<>> denylist(columns.denylist.begin(), columns.denylist.end());

  struct Latest {
    std::optional<Date> date;
    double value = std::numeric_limits<double>::quiet_NaN();
  };
  struct Track {
    Latest cases, deaths;
    // Most recent observation regardless of cutoff, for the monotonicity check.
    Latest last_cases, last_deaths;
  };
  std::map<CountryCode, Track> tracks;
  OutcomeTable table;

  auto observe = [&](Latest& best, Latest& last, Date date, std::optional<double> v) {
    if (!v) return;
    if (last.date && date > *last.date && *v < last.value) ++table.non_monotone_steps;
    if (!last.date || date > *last.date) last = {date, *v};
    if (date <= cutoff && (!best.date || date >= *best.date)) best = {date, *v};
  };

  auto read_value = [&](const csv::Record& rec, std::size_t idx,
                        std::string_view what) -> std::optional<double> {
    const auto& text = cell(rec, idx);
    if (is_missing_token(text)) return std::nullopt;
    auto v = csv::parse_double(text);
    if (!v) throw ParseError(rec.line, fmt::format("{}: '{}' is not a number", what, text));
    return v;
  };

  while (auto rec = reader.next()) {
    const auto raw_code = csv::trim(cell(*rec, code_col));
    if (raw_code.empty() || raw_code.starts_with("OWID_") || denylist.contains(raw_code)) continue;
    const auto code = CountryCode::parse(raw_code);
    if (!code) continue;

    const auto date = parse_date(cell(*rec, date_col));
    if (!date) {
      throw ParseError(rec->line, fmt::format("unparseable date '{}'", cell(*rec, date_col)));
    }
    auto& track = tracks[*code];
    observe(track.cases, track.last_cases, *date, read_value(*rec, cases_col, columns.cases));
    observe(track.deaths, track.last_deaths, *date, read_value(*rec, deaths_col, columns.deaths));
  }

  for (const auto& [code, track] : tracks) {
    if (!track.cases.date && !track.deaths.date) {
      table.exclusions.push_back({code, "no observation on or before cutoff " + to_string(cutoff)});
      continue;
    }
    OutcomeRecord rec{code, track.cases.value, track.deaths.value, {}};
    rec.as_of = std::max(track.cases.date.value_or(Date{}), track.deaths.date.value_or(Date{}));
    table.records.emplace(code, rec);
  }
  return table;
}

IndicatorColumns IndicatorColumns::from_config(const KeyValueConfig& config,
                                               const std::string& indicator) {
  const std::string section = "indicator." + indicator;
  auto get = [&](std::string_view key, std::string fallback) {
    if (auto v = config.get(section, key)) return *v;
    return config.get_or("indicators", key, std::move(fallback));
  };
  IndicatorColumns c;
  c.delimiter = config.get(section, "delimiter") ? delimiter_from(config, section)
                                                 : delimiter_from(config, "indicators");
  c.code = get("code_column", c.code);
  c.name = get("name_column", "");
  c.value = get("value_column", c.value);
  c.year = get("year_column", "");
  const auto year_text = get("year", "2019");
  const auto year = parse_int(year_text);
  if (!year) throw SchemaError(fmt::format("[{}] year '{}' is not an integer", section, year_text));
  c.year_value = *year;
  return c;
}

const std::vector<std::string>& standard_indicator_names() {
  static const std::vector<std::string> names = {
      "gdp_per_capita", "gini", "hdi", "life_expectancy", "median_age",
      "population_density", "sdi", "uhci"};
  return names;
}

IndicatorTable parse_indicator(std::istream& in, const std::string& indicator_name,
                               const IndicatorColumns& columns) {
  const std::string source = "indicator " + indicator_name;
  csv::Reader reader(in, columns.delimiter);
  std::optional<std::size_t> code_col, name_col, year_col;
  if (!columns.name.empty()) {
    name_col = reader.require_column(columns.name, source);
  } else {
    code_col = reader.require_column(columns.code, source);
  }
  const auto value_col = reader.require_column(columns.value, source);
  if (!columns.year.empty()) year_col = reader.require_column(columns.year, source);

  IndicatorTable table{indicator_name, columns.year_value, {}};
  while (auto rec = reader.next()) {
    if (year_col) {
      auto y = parse_int(cell(*rec, *year_col));
      if (!y || *y != columns.year_value) continue;
    }
    std::optional<CountryCode> code;
    std::string label;
    if (code_col) {
      label = std::string(csv::trim(cell(*rec, *code_col)));
      code = CountryCode::parse(label);
    } else {
      label = std::string(csv::trim(cell(*rec, *name_col)));
      code = code_for_name(label);
    }
    if (!code) continue;

    const auto& text = cell(*rec, value_col);
    if (is_missing_token(text)) continue;
    const auto value = csv::parse_double(text);
    if (!value || !std::isfinite(*value)) {
      throw ParseError(rec->line,
                       fmt::format("{}: non-numeric value '{}' for {}", source, text, code->str()));
    }
    if (!table.values.emplace(*code, *value).second) {
      throw Error(fmt::format("{}: duplicate country code {}", source, code->str()));
    }
  }
  return table;
}

JoinedDataset join(const PyramidMap& pyramids, const std::map<CountryCode, OutcomeRecord>& outcomes,
                   std::vector<IndicatorTable> indicators) {
  JoinedDataset out;
  for (const auto& [code, pyramid] : pyramids) {
    auto it = outcomes.find(code);
    if (it == outcomes.end()) {
      out.exclusions.push_back({code, "no outcome"});
      continue;
    }
    out.countries.push_back(code);
    out.pyramids.emplace(code, pyramid);
    out.outcomes.emplace(code, it->second);
  }
  for (const auto& [code, _] : outcomes) {
    if (!pyramids.contains(code)) out.exclusions.push_back({code, "no pyramid"});
  }
  std::sort(out.exclusions.begin(), out.exclusions.end(),
            [](const Exclusion& a, const Exclusion& b) { return a.code < b.code; });
  if (out.countries.empty()) {
    throw DegenerateInput(fmt::format(
        "join: no country has both a pyramid and an outcome ({} pyramids, {} outcomes)",
        pyramids.size(), outcomes.size()));
  }
  out.indicators = std::move(indicators);
  return out;
}

std::string exclusions_to_tsv(const std::vector<Exclusion>& exclusions) {
  std::string out;
  for (const auto& e : exclusions) {
    out += e.code.str();
    out += '\t';
    out += e.reason;
    out += '\n';
  }
  return out;
}

}  // namespace popstat
