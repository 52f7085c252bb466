#pragma once

// Small text helpers: CSV field splitting/quoting and lossless number
// formatting for the file formats.

#include <charconv>
#include <istream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "metatrail/errors.hpp"

namespace metatrail::text {

// Shortest decimal that round-trips to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  std::string s(buf, ptr);
  if (s == "-0") s = "0";
  return s;
}

inline double parse_double(std::string_view field, const std::string& context) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
    field.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
    throw ValidationError(context + ": not a number: '" + std::string(field) + "'");
  return value;
}

// Splits one CSV record. Supports double-quoted fields with "" escapes;
// a trailing carriage return is ignored.
inline std::vector<std::string> split_csv(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ValidationError("unterminated quoted CSV field");
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string quote_csv(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

// Reads CSV records, checking the header matches `expected` exactly. Blank
// lines are skipped. Each record is returned with its 1-based line number.
struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

inline std::vector<CsvRecord> read_csv(std::istream& in, const std::vector<std::string>& expected,
                                       const std::string& what) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<CsvRecord> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv(line);
    if (!have_header) {
      if (fields != expected) {
        std::string want;
        for (const auto& f : expected) want += (want.empty() ? "" : ",") + f;
        throw ValidationError(what + ": expected header '" + want + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != expected.size())
      throw ValidationError(what + " line " + std::to_string(lineno) + ": expected " +
                            std::to_string(expected.size()) + " fields, got " +
                            std::to_string(fields.size()));
    rows.push_back({lineno, std::move(fields)});
  }
  if (!have_header) throw ValidationError(what + ": missing header");
  return rows;
}

}  // namespace metatrail::text
