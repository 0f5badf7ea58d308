// Minimal RFC-4180 style CSV reading shared by the bundle and report readers.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lngopt::csv {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

inline std::vector<Row> parse(std::string_view text) {
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  row.line = line;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': quoted = true; any = true; break;
      case ',':
        row.fields.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r': break;
      case '\n':
        if (any || !field.empty()) {
          row.fields.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row = Row{};
        any = false;
        row.line = ++line;
        break;
      default: field.push_back(c); any = true;
    }
  }
  if (any || !field.empty()) {
    row.fields.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string quote(std::string_view value) {
  if (value.find_first_of(",\"\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace lngopt::csv
