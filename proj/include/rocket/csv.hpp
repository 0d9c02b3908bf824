#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rocket::csv {

// Shortest decimal string that round-trips the double exactly
// (std::to_chars general form). NaN/inf serialize as "nan"/"inf"/"-inf".
std::string format_double(double v);

// RFC 4180 quoting: fields containing comma, quote, CR or LF are wrapped in
// double quotes with embedded quotes doubled.
std::string escape_field(const std::string& field);

void write_row(std::ostream& os, const std::vector<std::string>& fields);

// Whole-file helpers for numeric tables with a header row.
void write_table(std::ostream& os, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

// Minimal RFC 4180 reader (quoted fields, CRLF or LF).
std::vector<std::vector<std::string>> read_rows(std::istream& is);

} // namespace rocket::csv
