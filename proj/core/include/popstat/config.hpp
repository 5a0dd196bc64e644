#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace popstat {

/// TOML-style `key = value` file grouped under `[section]` headers.
///
/// Supports bare and double-quoted string values and `#` comments. Nested
/// tables are written with dotted section names (`[indicator.gini]`). Keys
/// before the first header land in the "" section.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& in, std::string_view source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  std::optional<std::string> get(std::string_view section, std::string_view key) const;
  std::string get_or(std::string_view section, std::string_view key, std::string fallback) const;

  /// Comma-separated list value; empty when absent.
  std::vector<std::string> get_list(std::string_view section, std::string_view key) const;

  void set(std::string section, std::string key, std::string value);

  /// Section names starting with `prefix` (e.g. "indicator.").
  std::vector<std::string> sections_with_prefix(std::string_view prefix) const;

  bool empty() const noexcept { return sections_.empty(); }

 private:
  std::map<std::string, std::map<std::string, std::string, std::less<>>, std::less<>> sections_;
};

}  // namespace popstat
