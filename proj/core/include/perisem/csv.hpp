#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace perisem::csv {

/// 17 significant digits, '.' decimal separator; round-trips any double.
std::string format_double(double value);

/// Shortest round-trip representation, for labels and file names.
std::string format_short(double value);

/// Strict parse of a whole field; throws kFormat on trailing garbage.
double parse_double(std::string_view field);
long long parse_int(std::string_view field);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

/// Reads a CSV whose first line must equal `header` exactly. Returns the data
/// rows split into fields; every row must have as many fields as the header.
std::vector<std::vector<std::string>> read_table(std::istream& in,
                                                 std::string_view header);

}  // namespace perisem::csv
