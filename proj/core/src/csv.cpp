#include "popstat/csv.hpp"

#include <charconv>

#include "popstat/error.hpp"

namespace popstat::csv {

Reader::Reader(std::istream& in, char delimiter) : in_(in), delim_(delimiter) {
  Record rec;
  if (!read_record(rec)) {
    throw SchemaError("missing header row");
  }
  if (!rec.fields.empty()) {
    auto& first = rec.fields.front();
    if (first.rfind("\xEF\xBB\xBF", 0) == 0) first.erase(0, 3);
  }
  for (auto& f : rec.fields) header_.emplace_back(trim(f));
}

std::optional<std::size_t> Reader::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t Reader::require_column(std::string_view name, std::string_view source) const {
  auto idx = find_column(name);
  if (!idx) {
    throw SchemaError(std::string(source) + ": missing required column '" + std::string(name) +
                      "'");
  }
  return *idx;
}

std::optional<Record> Reader::next() {
  Record rec;
  while (read_record(rec)) {
    // Skip blank lines.
    if (rec.fields.size() == 1 && trim(rec.fields[0]).empty()) continue;
    return rec;
  }
  return std::nullopt;
}

bool Reader::read_record(Record& out) {
  out.fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  std::size_t start_line = line_ + 1;

  int ch;
  while ((ch = in_.get()) != std::char_traits<char>::eof()) {
    any = true;
    char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == delim_) {
      out.fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      ++line_;
      if (!field.empty() && field.back() == '\r') field.pop_back();
      out.fields.push_back(std::move(field));
      out.line = start_line;
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(start_line, "unterminated quoted field");
  if (!any) return false;
  ++line_;
  if (!field.empty() && field.back() == '\r') field.pop_back();
  out.fields.push_back(std::move(field));
  out.line = start_line;
  return true;
}

std::string escape(std::string_view field, char delimiter) {
  if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(delimiter);
    out += escape(fields[i], delimiter);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n\f\v";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

}  // namespace popstat::csv
