#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace popstat {

/// ISO-3166 alpha-3 country code. Always three upper-case ASCII letters.
class CountryCode {
 public:
  /// Throws popstat::Error when `code` is not three upper-case letters.
  explicit CountryCode(std::string_view code);

  /// Returns nullopt instead of throwing.
  static std::optional<CountryCode> parse(std::string_view code);

  const std::string& str() const noexcept { return code_; }

  friend auto operator<=>(const CountryCode&, const CountryCode&) = default;

 private:
  struct Unchecked {};
  CountryCode(Unchecked, std::string code) : code_(std::move(code)) {}

  std::string code_;
};

std::ostream& operator<<(std::ostream& os, const CountryCode& code);

/// Looks up a country by display name. Matching is case-insensitive and
/// accepts the common WPP/OWID/World Bank spellings ("Republic of Korea",
/// "Viet Nam", "Turkiye", ...).
std::optional<CountryCode> code_for_name(std::string_view name);

/// Canonical short English name, if the code is in the bundled table.
std::optional<std::string_view> name_for_code(const CountryCode& code);

/// Display name, falling back to the code itself.
std::string display_name(const CountryCode& code);

/// Codes from `known` ordered by closeness to `query` (edit distance on the
/// code and on the display name). At most `limit` entries.
std::vector<CountryCode> near_matches(std::string_view query,
                                      const std::vector<CountryCode>& known,
                                      std::size_t limit = 5);

}  // namespace popstat
