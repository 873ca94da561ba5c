#include "doctest.h"
#include "support.hpp"

#include "pencurv/errors.hpp"
#include "pencurv/io.hpp"

#include <cmath>

using namespace pencurv;
using namespace pencurv::testing;

TEST_CASE("parse nested and flat matrices") {
  PencilFile f = parse_pencil_file(R"({"d": 2, "label": "wc", "A": [[1, 0], [0, -1]], "B": [0, 1, 1, 0]})");
  CHECK(f.d == 2);
  CHECK(f.label == "wc");
  CHECK(f.exact());
  CHECK(f.exact_pencil().A == well_curved_d2().A);
  CHECK(f.exact_pencil().B == well_curved_d2().B);

  PencilFile g = parse_pencil_file(R"({"A": [["1/3", "0.25"], ["0.25", -2]], "B": [[1, 0], [0, 1]]})");
  CHECK(g.d == 2);
  CHECK(g.exact());
  CHECK(g.exact_pencil().A(0, 0) == Rational(1, 3));
  CHECK(g.exact_pencil().A(0, 1) == Rational(1, 4));
}

TEST_CASE("decimal and fraction strings with leading zeros") {
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("007") == 7);
  CHECK(parse_rational("1/010") == Rational(1, 10));
  CHECK(parse_rational("-0.125e1") == Rational(-5, 4));
  CHECK(parse_rational("0") == 0);
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("."), ParseError);
}

TEST_CASE("float entries") {
  PencilFile f = parse_pencil_file(R"({"A": [[0.1, 2.5e-1], [0.25, 1]], "B": [[1, 0], [0, 1]]})");
  CHECK_FALSE(f.exact());
  CHECK(f.float_pencil().A(0, 0) == 0.1);
  CHECK(f.exact_pencil().A(0, 0) == Rational(0.1));
  CHECK(f.exact_pencil().A(0, 0) != Rational(1, 10));
}

TEST_CASE("diagnostics") {
  try {
    parse_pencil_file(R"({"d": 2, "A": [[1, 2], [3, 1]], "B": [[0, 1], [1, 0]]})");
    FAIL("expected NotSymmetric");
  } catch (const NotSymmetric& e) {
    CHECK(e.row + e.col == 1);
    CHECK(std::string(e.what()).find("A[0][1]") != std::string::npos);
    CHECK(std::string(e.what()).find("A[1][0]") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_pencil_file(R"({"d": 3, "A": [[1, 0], [0, 1]], "B": [[1, 0], [0, 1]]})"), DimensionMismatch);
  CHECK_THROWS_AS(parse_pencil_file(R"({"A": [[1, 0], [0]], "B": [[1, 0], [0, 1]]})"), DimensionMismatch);
  CHECK_THROWS_AS(parse_pencil_file(R"({"A": [1, 0, 0, 1], "B": [1, 0, 0]})"), DimensionMismatch);
  CHECK_THROWS_AS(parse_pencil_file(R"({"A": [[1]], "B": [[1]]})"), DimensionMismatch);
  CHECK_THROWS_AS(parse_pencil_file(R"({"A": [[1, 0], [0, 1]]})"), ParseError);
  CHECK_THROWS_AS(parse_pencil_file(R"({"A": [[1, "x"], ["x", 1]], "B": [[1, 0], [0, 1]]})"), ParseError);
  CHECK_THROWS_AS(parse_pencil_file(R"({"A": [[1, 0], [0, 1]], "B": [[1, 0], [0, 1]])"), ParseError);
  CHECK_THROWS_AS(parse_pencil_file(R"([1, 2])"), ParseError);
  CHECK_THROWS_AS(read_pencil_file("/nonexistent/pencil.json"), Error);
  try {
    parse_pencil_file(R"({"A": [[1, true], [0, 1]], "B": [[1, 0], [0, 1]]})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("A[0][1]") != std::string::npos);
  }
}

TEST_CASE("nearly symmetric floats are accepted") {
  CHECK_NOTHROW(parse_pencil_file(R"({"A": [[1.0, 0.3], [0.30000000000000004, 1.0]], "B": [[1, 0], [0, 1]]})"));
  CHECK_THROWS_AS(parse_pencil_file(R"({"A": [[1.0, 0.3], [0.3001, 1.0]], "B": [[1, 0], [0, 1]]})"), NotSymmetric);
}

TEST_CASE("property: render then parse is the identity") {
  Gen g(81);
  for (int trial = 0; trial < 50; ++trial) {
    int d = g.uniform(2, 6);
    PencilQ p = g.pencil(d);
    PencilFile f = make_pencil_file(p, trial % 2 ? std::optional<std::string>("trial") : std::nullopt);
    PencilFile back = parse_pencil_file(render_pencil_file(f));
    CHECK(back == f);
    CHECK(back.exact_pencil().A == p.A);
    CHECK(back.exact_pencil().B == p.B);
  }
  for (int trial = 0; trial < 50; ++trial) {
    int d = g.uniform(2, 6);
    MatD a(d, d), b(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        a(i, j) = a(j, i) = g.real(-10, 10);
        b(i, j) = b(j, i) = std::ldexp(g.real(-1, 1), -40);
      }
    PencilFile f = make_pencil_file(PencilD(a, b));
    PencilFile back = parse_pencil_file(render_pencil_file(f));
    CHECK(back == f);
    CHECK(back.float_pencil().A == a);
    CHECK(back.float_pencil().B == b);
  }
}
