#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace universals::csv {

using Row = std::vector<std::string>;

// RFC 4180 reader: comma separated, '"' quoting with "" escapes, LF or CRLF
// line ends, optional UTF-8 BOM. Throws ParseError with 1-based row/column.
std::vector<Row> read(std::istream& in, const std::string& source_name);
std::vector<Row> read_file(const std::string& path);

// Quotes the field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

}  // namespace universals::csv
