#pragma once

// CSV reader: comma-separated, UTF-8, double-quoted fields with "" escapes,
// embedded commas/newlines inside quotes. Unquoted fields are trimmed of
// surrounding whitespace (comma-space separated files are common). Blank
// lines and lines starting with '|' (UCI-style comments) are skipped.

#include "binotab/ini.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace binotab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

namespace detail {

// Reads one record starting at `pos`; honors quotes spanning newlines.
inline bool csv_next_record(const std::string& text, std::size_t& pos,
                            std::vector<std::string>& fields) {
  fields.clear();
  const std::size_t n = text.size();
  if (pos >= n) return false;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  auto push_field = [&] {
    fields.push_back(field_was_quoted ? field : trim(field));
    field.clear();
    field_was_quoted = false;
  };
  while (pos < n) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < n && text[pos + 1] == '"') {
          field += '"';
          pos += 2;
        } else {
          quoted = false;
          ++pos;
        }
      } else {
        field += c;
        ++pos;
      }
      continue;
    }
    if (c == '"' && !field_was_quoted && trim(field).empty()) {
      quoted = true;
      field_was_quoted = true;
      field.clear();
      ++pos;
    } else if (c == ',') {
      push_field();
      ++pos;
    } else if (c == '\n') {
      ++pos;
      break;
    } else if (c == '\r') {
      ++pos;  // part of \r\n or stray
    } else if (field_was_quoted && (c == ' ' || c == '\t')) {
      ++pos;  // padding between a closing quote and the delimiter
    } else {
      field += c;
      ++pos;
    }
  }
  push_field();
  return true;
}

}  // namespace detail

inline CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>") {
  CsvTable table;
  std::size_t pos = 0;
  std::vector<std::string> fields;
  bool have_header = false;
  std::size_t record_no = 0;
  while (detail::csv_next_record(text, pos, fields)) {
    ++record_no;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (!fields[0].empty() && fields[0][0] == '|') continue;
    if (!have_header) {
      table.header = fields;
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw std::runtime_error(origin + ": record " + std::to_string(record_no) + " has " +
                               std::to_string(fields.size()) + " fields, header has " +
                               std::to_string(table.header.size()));
    }
    table.rows.push_back(fields);
  }
  if (!have_header) throw std::runtime_error(origin + ": no header row");
  return table;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

}  // namespace binotab
