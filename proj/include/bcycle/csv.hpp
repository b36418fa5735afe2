#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace bcycle::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes; surrounding whitespace of unquoted fields is kept.
[[nodiscard]] std::vector<std::string> split_line(std::string_view line);

/// Quotes a field when it contains a comma, quote or newline.
[[nodiscard]] std::string escape(std::string_view field);

/// Reads the next data line: strips CR and a leading UTF-8 BOM, skips blank
/// lines and `#` metadata lines. Returns false at end of input.
bool next_record(std::istream& in, std::string& line, std::size_t& line_no);

/// Shortest round-trip text for a double ("%.17g" fallback semantics).
[[nodiscard]] std::string format_double(double value, int significant_digits = 17);

[[nodiscard]] double parse_double(std::string_view text);
[[nodiscard]] long long parse_integer(std::string_view text);

}  // namespace bcycle::csv
