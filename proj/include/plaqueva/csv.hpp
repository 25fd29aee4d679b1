#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace plaqueva::csv {

struct Row {
  std::size_t line = 0;  // 1-based line where the record starts
  std::vector<std::string> cells;
};

/// Splits RFC 4180 text into records. Quoted cells may contain commas,
/// doubled quotes and newlines. Blank lines are skipped. Throws ParseError
/// on an unterminated quote.
std::vector<Row> read(std::string_view text);

/// Quotes the cell when it contains a comma, quote, or line break.
std::string escape(std::string_view cell);

std::string join(const std::vector<std::string>& cells);

/// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

}  // namespace plaqueva::csv
