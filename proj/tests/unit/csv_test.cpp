#include <sstream>

#include "doctest.h"

#include "universals/csv.hpp"
#include "universals/error.hpp"

using namespace universals;

namespace {
std::vector<csv::Row> parse(const std::string& s) {
  std::istringstream in(s);
  return csv::read(in, "t.csv");
}
}  // namespace

TEST_CASE("quoted fields, escapes, CRLF and BOM") {
  const auto rows = parse("\xEF\xBB\xBF" "a,\"b,c\",\"d\"\"e\"\r\n1,,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == csv::Row{"a", "b,c", "d\"e"});
  CHECK(rows[1] == csv::Row{"1", "", "3"});
}

TEST_CASE("embedded newline in quotes") {
  const auto rows = parse("x,\"line1\nline2\"\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][1] == "line1\nline2");
}

TEST_CASE("parse errors carry row and column") {
  try {
    parse("a,b\nc,d\"e\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.row() == 2);
    CHECK(e.column() == 2);
  }
  CHECK_THROWS_AS(parse("a,\"unterminated\n"), ParseError);
  CHECK_THROWS_AS(parse("\"ab\"c,d\n"), ParseError);
}

TEST_CASE("escape round-trips through read") {
  const csv::Row row{"plain", "com,ma", "quo\"te", "new\nline", ""};
  std::ostringstream out;
  csv::write_row(out, row);
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  const auto back = parse(out.str());
  REQUIRE(back.size() == 1);
  CHECK(back[0] == row);
}
