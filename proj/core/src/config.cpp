#include "popstat/config.hpp"

#include <fstream>

#include "popstat/csv.hpp"
#include "popstat/error.hpp"

namespace popstat {

KeyValueConfig KeyValueConfig::parse(std::istream& in, std::string_view source) {
  KeyValueConfig cfg;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = csv::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ParseError(line_no, std::string(source) + ": unterminated section header");
      }
      section = std::string(csv::trim(line.substr(1, line.size() - 2)));
      cfg.sections_[section];
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, std::string(source) + ": expected 'key = value'");
    }
    std::string key(csv::trim(line.substr(0, eq)));
    std::string_view rhs = csv::trim(line.substr(eq + 1));
    std::string value;
    if (!rhs.empty() && rhs.front() == '"') {
      auto close = rhs.find('"', 1);
      if (close == std::string_view::npos) {
        throw ParseError(line_no, std::string(source) + ": unterminated string for '" + key + "'");
      }
      value = std::string(rhs.substr(1, close - 1));
    } else {
      auto hash = rhs.find('#');
      value = std::string(csv::trim(rhs.substr(0, hash)));
    }
    if (key.empty()) throw ParseError(line_no, std::string(source) + ": empty key");
    cfg.sections_[section][key] = std::move(value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  return parse(in, path.string());
}

std::optional<std::string> KeyValueConfig::get(std::string_view section,
                                               std::string_view key) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string KeyValueConfig::get_or(std::string_view section, std::string_view key,
                                   std::string fallback) const {
  auto v = get(section, key);
  return v ? *v : std::move(fallback);
}

std::vector<std::string> KeyValueConfig::get_list(std::string_view section,
                                                  std::string_view key) const {
  std::vector<std::string> out;
  auto v = get(section, key);
  if (!v) return out;
  std::string_view rest = *v;
  while (!rest.empty()) {
    auto comma = rest.find(',');
    auto item = csv::trim(rest.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void KeyValueConfig::set(std::string section, std::string key, std::string value) {
  sections_[std::move(section)][std::move(key)] = std::move(value);
}

std::vector<std::string> KeyValueConfig::sections_with_prefix(std::string_view prefix) const {
  std::vector<std::string> out;
  for (const auto& [name, _] : sections_) {
    if (name.rfind(prefix, 0) == 0) out.push_back(name);
  }
  return out;
}

}  // namespace popstat
