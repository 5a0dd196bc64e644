#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace popstat::csv {

/// One parsed record plus the source line it started on (1-based).
struct Record {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Minimal RFC-4180 reader: quoted fields, doubled quotes, CRLF, UTF-8 BOM.
/// The first record is taken as the header.
class Reader {
 public:
  Reader(std::istream& in, char delimiter = ',');

  const std::vector<std::string>& header() const noexcept { return header_; }

  /// Index of `name` in the header, or nullopt.
  std::optional<std::size_t> find_column(std::string_view name) const;

  /// Like find_column but throws SchemaError naming `source`.
  std::size_t require_column(std::string_view name, std::string_view source) const;

  /// Next record, or nullopt at EOF. Throws ParseError on an unterminated quote.
  std::optional<Record> next();

 private:
  bool read_record(Record& out);

  std::istream& in_;
  char delim_;
  std::size_t line_ = 0;
  std::vector<std::string> header_;
};

/// Quotes `field` when it contains the delimiter, a quote or a newline.
std::string escape(std::string_view field, char delimiter = ',');

/// Joins fields into one line, escaping each as needed (no trailing newline).
std::string join(const std::vector<std::string>& fields, char delimiter = ',');

/// Strips ASCII whitespace on both ends.
std::string_view trim(std::string_view s);

/// Strict double parse of a trimmed cell. nullopt on empty or trailing garbage.
std::optional<double> parse_double(std::string_view cell);

}  // namespace popstat::csv
