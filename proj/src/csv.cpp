#include "universals/csv.hpp"

#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "universals/error.hpp"

namespace universals::csv {

std::vector<Row> read(std::istream& in, const std::string& source_name) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<Row> rows;
  Row row;
  std::string field;
  std::size_t line = 1;
  std::size_t column = 1;

  std::size_t i = 0;
  if (text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;

  bool row_has_content = false;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    ++column;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    ++line;
    column = 1;
    row_has_content = false;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '"') {
      if (!field.empty()) {
        throw ParseError(source_name, line, column, "quote inside unquoted field");
      }
      const std::size_t start_line = line;
      ++i;
      for (;;) {
        if (i >= text.size()) {
          throw ParseError(source_name, start_line, column, "unterminated quoted field");
        }
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.push_back('"');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        field.push_back(text[i++]);
      }
      row_has_content = true;
      if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
        throw ParseError(source_name, line, column, "characters after closing quote");
      }
      continue;
    }
    if (c == ',') {
      end_field();
      row_has_content = true;
      ++i;
      continue;
    }
    if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++i;
      if (row_has_content || !field.empty()) {
        end_row();
      } else {
        ++line;  // blank line
      }
      continue;
    }
    field.push_back(c);
    row_has_content = true;
    ++i;
  }
  if (row_has_content || !field.empty()) end_row();
  return rows;
}

std::vector<Row> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read(in, path);
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

}  // namespace universals::csv
