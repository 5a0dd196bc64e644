#include "popstat/types.hpp"

#include <charconv>
#include <cstdio>

#include "popstat/csv.hpp"

namespace popstat {

std::optional<std::size_t> age_group_index(std::string_view label) {
  label = csv::trim(label);
  for (std::size_t i = 0; i < kAgeGroupLabels.size(); ++i) {
    if (kAgeGroupLabels[i] == label) return i;
  }
  return std::nullopt;
}

std::optional<Sex> parse_sex(std::string_view text) {
  text = csv::trim(text);
  if (text == "male" || text == "Male" || text == "MALE" || text == "M" || text == "m") {
    return Sex::male;
  }
  if (text == "female" || text == "Female" || text == "FEMALE" || text == "F" || text == "f") {
    return Sex::female;
  }
  return std::nullopt;
}

std::string_view to_string(Sex sex) { return sex == Sex::male ? "male" : "female"; }

std::optional<Date> parse_date(std::string_view text) {
  text = csv::trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc{} || ptr != first + len) return std::nullopt;
    return v;
  };
  auto y = num(0, 4), m = num(5, 2), d = num(8, 2);
  if (!y || !m || !d) return std::nullopt;
  Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
            std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string to_string(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

}  // namespace popstat
