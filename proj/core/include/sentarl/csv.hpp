#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentarl::csv {

/// Splits one CSV record. Supports double-quoted fields with embedded commas
/// and "" escapes; records never span lines. Throws std::invalid_argument on
/// an unterminated quote.
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or leading/trailing space.
std::string escape(std::string_view field);

/// Shortest representation that parses back to the identical double.
std::string format_double(double value);

/// Strict decimal parse of the whole field; throws std::invalid_argument.
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

/// Line-oriented reader that tracks 1-based line numbers and skips blank lines.
class Reader {
 public:
  explicit Reader(const std::filesystem::path& path);

  /// Reads the header row and checks it equals `expected` exactly.
  /// Throws ParseError otherwise.
  void expect_header(const std::vector<std::string>& expected);

  /// Next non-blank record, or nullopt at end of file.
  std::optional<std::vector<std::string>> next();

  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::ifstream in_;
  std::string source_;
  std::size_t line_ = 0;
};

/// Writes `fields` as one CSV record terminated by '\n'.
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace sentarl::csv
