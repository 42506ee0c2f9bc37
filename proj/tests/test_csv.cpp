#include "ordrobust/csv.hpp"

#include "ordrobust/common.hpp"

#include <doctest.h>

using namespace ordrobust;

TEST_CASE("rfc-4180 parsing: quotes, escapes, crlf") {
  const std::string text =
      "a,b,c\r\n"
      "1,\"hello, world\",3\r\n"
      "4,\"quote \"\"inside\"\"\",6\r\n"
      "7,,9\r\n";
  const CsvTable t = parse_csv(text);
  REQUIRE(t.header.size() == 3);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0][1] == "hello, world");
  CHECK(t.rows[1][1] == "quote \"inside\"");
  CHECK(t.rows[2][1] == "");
}

TEST_CASE("ragged rows are rejected") {
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), ValidationError);
  CHECK_THROWS_AS(parse_csv(""), ValidationError);
}

TEST_CASE("missing-cell convention") {
  CHECK(cell_missing(""));
  CHECK(cell_missing("NA"));
  CHECK(cell_missing("nan"));
  CHECK(!cell_missing("0"));
}

TEST_CASE("format_double round-trips doubles bit-exactly") {
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    double v;
    switch (i % 4) {
      case 0: v = rng.normal(); break;
      case 1: v = rng.normal() * 1e-17; break;
      case 2: v = rng.normal() * 1e17; break;
      default: v = static_cast<double>(rng.uniform_int(1000)); break;
    }
    const std::string s = format_double(v);
    CHECK(parse_double(s, "test") == v);
  }
}

TEST_CASE("csv write/parse round-trip") {
  CsvTable t;
  t.header = {"x", "label,with,commas"};
  t.rows = {{"1.5", "line\nbreak"}, {"-2", "\"quoted\""}};
  const CsvTable back = parse_csv(format_csv(t));
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
}
