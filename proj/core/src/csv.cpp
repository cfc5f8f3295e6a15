#include "perisem/csv.hpp"

#include <charconv>
#include <istream>
#include <string>

#include "perisem/errors.hpp"

namespace perisem::csv {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_short(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view field) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw Error(ErrorKind::kFormat, "not a number: '" + std::string(field) + "'");
  }
  return value;
}

long long parse_int(std::string_view field) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  long long value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw Error(ErrorKind::kFormat, "not an integer: '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::vector<std::string>> read_table(std::istream& in,
                                                 std::string_view header) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::kFormat, "missing CSV header '" + std::string(header) + "'");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw Error(ErrorKind::kFormat,
                "unexpected CSV header '" + line + "', want '" + std::string(header) + "'");
  }
  const std::size_t width = split(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != width) {
      throw Error(ErrorKind::kFormat, "CSV row has " + std::to_string(fields.size()) +
                                          " fields, want " + std::to_string(width));
    }
    rows.emplace_back(fields.begin(), fields.end());
  }
  return rows;
}

}  // namespace perisem::csv
