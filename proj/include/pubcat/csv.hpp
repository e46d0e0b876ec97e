#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pubcat::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
/// A leading UTF-8 byte-order mark is dropped and blank lines are skipped.
/// Throws Malformed on an unterminated quote.
std::vector<Row> parse(std::string_view text);

/// Parses `text` and checks that its first row equals `header`
/// (case-insensitive, surrounding blanks ignored). Returns the data rows.
std::vector<Row> parse_with_header(std::string_view text,
                                   const std::vector<std::string>& header);

/// Quotes the field only if it contains a comma, quote or line break.
std::string escape(std::string_view field);

std::string join(const Row& row);

/// Shortest decimal text that reads back to exactly `value`.
std::string format_number(double value);

/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Strict decimal parse of the whole string (surrounding blanks allowed).
double parse_number(std::string_view text);

}  // namespace pubcat::csv
