#pragma once

#include <string>
#include <vector>

namespace holorepair::csv {

/// Raw CSV table: header + rows, fields untouched (no canonicalization).
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC-4180 parse. Requires a header row; rejects ragged rows (error message
/// names the 1-based data row). Handles quoted fields with embedded commas,
/// quotes, and newlines; accepts both LF and CRLF.
Table read_file(const std::string& path);
Table read_string(const std::string& text, const std::string& origin = "<string>");

/// Minimal quoting: a field is quoted only when it contains a comma, quote,
/// CR or LF. Lines end with '\n'.
std::string write_string(const Table& table);
void write_file(const Table& table, const std::string& path);

}  // namespace holorepair::csv
