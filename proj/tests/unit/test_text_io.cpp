#include <doctest.h>

#include <sstream>

#include "mcprox/error.hpp"
#include "mcprox/text_io.hpp"

using namespace mcprox;

TEST_CASE("doubles print in shortest round-trip form") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(16.92) == "16.92");
    CHECK(format_double(100) == "100");
    for (double v : {1.0 / 3.0, 1e-17, 12345.678901234567, -2.5e300}) CHECK(*parse_double(format_double(v)) == v);
    CHECK(format_fixed(0.5765, 2) == "0.58");
}

TEST_CASE("number parsing is strict") {
    CHECK(parse_int("+30") == 30);
    CHECK(parse_int("-67") == -67);
    CHECK_FALSE(parse_int("6x"));
    CHECK_FALSE(parse_int(""));
    CHECK(parse_double("-1.98") == -1.98);
    CHECK_FALSE(parse_double("nope"));
}

TEST_CASE("csv tables are addressed by header") {
    std::istringstream in("# comment\nb,a\n\n2,1\n4,3\n");
    const auto t = CsvTable::read(in, "t.csv");
    CHECK(t.rows() == 2);
    CHECK(t.row(1)[t.require("a")] == "3");
    CHECK(t.line_of(1) == 5);
    CHECK_FALSE(t.find("c"));
    CHECK_THROWS_WITH_AS(t.require("c"), doctest::Contains("c"), DataError);
}
