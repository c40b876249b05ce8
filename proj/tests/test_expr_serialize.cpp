#include <doctest.h>

#include "generators.hpp"
#include "novikit/error.hpp"
#include "novikit/serialize.hpp"

using namespace novikit;

namespace {

template <class F>
std::string error_text(F&& f, ErrorKind expected) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.kind() == expected);
    return e.detail();
  }
  FAIL("expected an error");
  return "";
}

}  // namespace

TEST_CASE("rational expressions") {
  Parameters p{{"A1", Rational(1, 4)}, {"A7", Rational(1)}};
  CHECK(parse_rational_expr("A1+A1-A7", p) == Rational(-1, 2));
  CHECK(parse_rational_expr("3/2") == Rational(3, 2));
  CHECK(parse_rational_expr("(1+2)*A1/3", p) == Rational(1, 4));
  error_text([] { parse_rational_expr("A9"); }, ErrorKind::ParseError);
}

TEST_CASE("scalar text") {
  NovikovScalar s = parse_scalar("2 + T^(1/2) + O(T^3)");
  CHECK(s.terms().size() == 2);
  CHECK(s.cutoff() == ExtRational(Rational(3)));
  CHECK(parse_scalar("T^{1/2}*T^{1/2}") == parse_scalar("T"));
  CHECK(parse_scalar("(1+i)*(1-i)") == parse_scalar("2"));
  CHECK(parse_scalar("2T") == parse_scalar("2*T"));
  CHECK(parse_scalar(parse_scalar("1/2 - 1/4*T^(1/2) + O(T^2)").str()) == parse_scalar("1/2 - 1/4*T^(1/2) + O(T^2)"));
  error_text([] { parse_scalar("T^x"); }, ErrorKind::ParseError);
  error_text([] { parse_scalar("1 +"); }, ErrorKind::ParseError);
}

TEST_CASE("series text") {
  VarSet uv = make_varset({"u", "v"});
  MultiSeries s = parse_series("T^{Delta}(1 - u v)", uv, {{"Delta", Rational(1)}});
  CHECK(s == parse_series("T - T*u*v", uv));
  CHECK(parse_series("u^-1 * u", uv) == parse_series("1", uv));
  CHECK(parse_series("u^{a}", uv, {{"a", Rational(2)}}) == parse_series("u*u", uv));
  error_text([&] { parse_series("w", uv); }, ErrorKind::ParseError);
  error_text([&] { parse_series("u^(1/2)", uv); }, ErrorKind::ParseError);
}

TEST_CASE("points") {
  Point p = parse_point("u=T^(1/2), v=T^(1/2)");
  CHECK(p.size() == 2);
  CHECK(p.at("u") == parse_scalar("T^(1/2)"));
}

TEST_CASE("constraint text") {
  Parameters p{{"A1", Rational(1)}, {"A7", Rational(3)}};
  ValuationConstraint c = constraint_from_text("val(t) - val(x1) >= A7 - A1", p);
  CHECK(c.form.at("t") == Rational(1));
  CHECK(c.form.at("x1") == Rational(-1));
  CHECK(c.rel == Relation::Ge);
  CHECK(c.bound == ExtRational(Rational(2)));
  ValuationConstraint nz = constraint_from_text("val(u) < inf", {});
  CHECK(nz.nonzero_condition());
  error_text([] { constraint_from_text("val(u) > inf", {}); }, ErrorKind::ParseError);
}

TEST_CASE("scalar JSON round trip") {
  std::mt19937 rng(31);
  for (int n = 0; n < 500; ++n) {
    NovikovScalar s = gen::scalar(rng, 5);
    Json j = to_json(s);
    REQUIRE(scalar_from_json(j, {}, "/") == s);
    REQUIRE(scalar_from_json(parse_json_text(j.dump(), "mem"), {}, "/") == s);
  }
  Json exact = to_json(parse_scalar("2*T^(1/2) - i"));
  CHECK(exact.dump() ==
        R"({"terms":[{"exp":"0","re":"0","im":"-1"},{"exp":"1/2","re":"2","im":"0"}],"cutoff":"inf"})");
}

TEST_CASE("series JSON round trip") {
  std::mt19937 rng(32);
  VarSet xy = make_varset({"x", "y"});
  for (int n = 0; n < 300; ++n) {
    MultiSeries s = gen::polynomial(rng, xy, 5, 3, true);
    REQUIRE(series_from_json(to_json(s), xy, {}, "/") == s);
  }
}

TEST_CASE("domain JSON") {
  VarSet uv = make_varset({"u", "v"});
  Json j = parse_json_text(R"({"any": [["val(u) >= 0", "val(v) > 0"], ["val(u) > 0", "val(v) >= 0"]]})", "mem");
  Domain d = domain_from_json(j, uv, {}, "/domain");
  CHECK(d.clauses.size() == 2);
  CHECK(domain_from_json(to_json(d), uv, {}, "/") == d);
  std::string msg = error_text([&] { domain_from_json(parse_json_text(R"(["val(w) > 0"])", "mem"), uv, {}, "/domain"); },
                               ErrorKind::ParseError);
  CHECK(msg.find("/domain/0") != std::string::npos);
}

TEST_CASE("syntax errors carry line and column") {
  std::string msg = error_text([] { parse_json_text("{\n  \"a\": [1, 2,\n}", "broken.json"); }, ErrorKind::ParseError);
  CHECK(msg.find("broken.json:3:") == 0);
}

TEST_CASE("atlas errors name the JSON path") {
  Json j = parse_json_text(R"({"charts": [{"name": "A", "vars": ["x"], "domain": [], "potential": "x"}],
    "transitions": [{"id": "A_A", "src": "A", "dst": "A", "overlap": [], "map": {"x": "x +"}}]})",
                           "mem");
  std::string msg = error_text([&] { atlas_from_json(j); }, ErrorKind::ParseError);
  CHECK(msg.find("/transitions/0/map/x") != std::string::npos);
}
