#include "plantsim/csv.hpp"

#include "plantsim/error.hpp"

namespace plantsim::csv {

std::optional<std::size_t> Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

Table parse(std::string_view text) {
  Table t;
  std::vector<std::string> record;
  std::string field;
  std::size_t line = 1, record_line = 1;
  bool in_quotes = false, field_started = false, any = false;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (t.header.empty() && t.rows.empty() && !any) {
      t.header = std::move(record);
      any = true;
    } else {
      if (record.size() != t.header.size()) {
        throw ParseError(record_line, 1, "expected " + std::to_string(t.header.size()) + " fields, found " +
                                             std::to_string(record.size()));
      }
      t.rows.push_back(std::move(record));
      t.lines.push_back(record_line);
    }
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty()) throw ParseError(line, 1, "quote inside an unquoted field");
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      if (field_started || !field.empty() || !record.empty()) end_record();
      ++line;
      record_line = line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw ParseError(record_line, 1, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  if (t.header.empty()) throw ParseError(1, 1, "missing header row");
  return t;
}

std::string escape(std::string_view f) {
  if (f.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(f);
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

}  // namespace plantsim::csv
