#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "popstat/country.hpp"

namespace popstat {

enum class Sex { male = 0, female = 1 };

inline constexpr std::size_t kSexCount = 2;
inline constexpr std::size_t kAgeGroupCount = 21;
inline constexpr std::size_t kPyramidBins = kSexCount * kAgeGroupCount;

/// Five-year age groups in pyramid order, youngest first.
inline constexpr std::array<std::string_view, kAgeGroupCount> kAgeGroupLabels = {
    "0-4",   "5-9",   "10-14", "15-19", "20-24", "25-29", "30-34",
    "35-39", "40-44", "45-49", "50-54", "55-59", "60-64", "65-69",
    "70-74", "75-79", "80-84", "85-89", "90-94", "95-99", "100+"};

std::optional<std::size_t> age_group_index(std::string_view label);
std::optional<Sex> parse_sex(std::string_view text);
std::string_view to_string(Sex sex);

/// Bin index of (sex, age group) in a 42-bin pyramid.
constexpr std::size_t pyramid_bin(Sex sex, std::size_t age_group) {
  return static_cast<std::size_t>(sex) * kAgeGroupCount + age_group;
}

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD. nullopt on malformed or out-of-range input.
std::optional<Date> parse_date(std::string_view text);
std::string to_string(Date date);

/// One population count cell for a country-year.
struct RawPopulationRow {
  CountryCode country_code;
  std::string country_name;
  int year = 0;
  Sex sex = Sex::male;
  std::size_t age_group = 0;  // index into kAgeGroupLabels
  double count = 0.0;         // persons; thousands are fine

  friend bool operator==(const RawPopulationRow&, const RawPopulationRow&) = default;
};

/// A country dropped somewhere in the pipeline and why.
struct Exclusion {
  CountryCode code;
  std::string reason;

  friend bool operator==(const Exclusion&, const Exclusion&) = default;
};

}  // namespace popstat
