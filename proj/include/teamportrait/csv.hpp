#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace teamportrait::csv {

struct Row {
  std::size_t line = 0;  // 1-based line on which the row starts
  std::vector<std::string> cells;
};

/// RFC 4180 reader: comma separated, double-quote quoting with "" escapes,
/// quoted cells may span lines. CRLF and LF are both accepted.
inline std::vector<Row> read(std::string_view input, char separator = ',') {
  std::vector<Row> rows;
  Row row;
  std::string cell;
  std::size_t line = 1;
  row.line = 1;
  bool in_quotes = false;
  bool cell_was_quoted = false;
  bool row_has_content = false;

  auto end_cell = [&] {
    row.cells.push_back(std::move(cell));
    cell.clear();
    cell_was_quoted = false;
  };
  auto end_row = [&](std::size_t next_line) {
    if (row_has_content) {
      end_cell();
      rows.push_back(std::move(row));
    }
    row = Row{};
    row.line = next_line;
    cell.clear();
    cell_was_quoted = false;
    row_has_content = false;
  };

  for (std::size_t i = 0; i < input.size(); ++i) {
    char c = input[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < input.size() && input[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!cell.empty() || cell_was_quoted) throw ParseError(line, "unexpected quote inside unquoted cell");
      in_quotes = true;
      cell_was_quoted = true;
      row_has_content = true;
    } else if (c == separator) {
      end_cell();
      row_has_content = true;
    } else if (c == '\r') {
      // swallowed; the following '\n' ends the row
    } else if (c == '\n') {
      ++line;
      end_row(line);
    } else {
      if (cell_was_quoted) throw ParseError(line, "characters after closing quote");
      cell.push_back(c);
      row_has_content = true;
    }
  }
  if (in_quotes) throw ParseError(row.line, "unterminated quoted cell");
  end_row(line);
  return rows;
}

}  // namespace teamportrait::csv
