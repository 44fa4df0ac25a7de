#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plantsim::csv {

// RFC 4180 style: comma separated, double-quoted fields may contain commas,
// quotes ("") and newlines. A trailing newline does not add a row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // 1-based source line of each row

  std::optional<std::size_t> column(std::string_view name) const;
};

// First record is the header; every row must have the header's width.
// Throws plantsim::ParseError with the line number otherwise.
Table parse(std::string_view text);

std::string escape(std::string_view field);
std::string row(const std::vector<std::string>& fields);

}  // namespace plantsim::csv
