#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace riskpat::csv {

using Row = std::vector<std::string>;

// RFC-4180 reader: comma separator, double-quote quoting with "" escapes,
// CRLF or LF line endings, quoted fields may span lines. A UTF-8 BOM at the
// start of the input is skipped. Blank lines are dropped.
std::vector<Row> parse(std::string_view text);
std::vector<Row> read_file(const std::filesystem::path& path);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string format_row(const Row& row);

}  // namespace riskpat::csv
