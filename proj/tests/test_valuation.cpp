#include <doctest.h>

#include "generators.hpp"
#include "novikit/serialize.hpp"
#include "oracles.hpp"

using namespace novikit;

namespace {

ValuationConstraint C(const char* text, const Parameters& p = {}) { return constraint_from_text(text, p); }

Conjunction without(const Conjunction& c, std::size_t i) {
  Conjunction out = c;
  out.erase(out.begin() + static_cast<long>(i));
  return out;
}

void check_certificate(const Conjunction& input, const Conjunction& cert) {
  for (const auto& c : cert) REQUIRE(std::find(input.begin(), input.end(), c) != input.end());
  REQUIRE_FALSE(feasible(cert).feasible);
  for (std::size_t i = 0; i < cert.size(); ++i) REQUIRE(feasible(without(cert, i)).feasible);
}

}  // namespace

TEST_CASE("disjoint regions") {
  Conjunction c{C("val(x1) = 0"), C("val(x1) > 0")};
  FeasibilityResult r = feasible(c);
  CHECK_FALSE(r.feasible);
  REQUIRE(r.certificates.size() == 1);
  CHECK(r.certificates[0].size() == 2);
  check_certificate(c, r.certificates[0]);
}

TEST_CASE("area criterion") {
  // t = T^(sum A - A7) x1 with val(t) = 0 and val(x1) >= 0.
  for (auto [sum, a7, expect] : {std::tuple{Rational(1, 2), Rational(1), true}, std::tuple{Rational(2), Rational(1), false},
                                 std::tuple{Rational(1), Rational(1), true}}) {
    Parameters p{{"S", sum}, {"A7", a7}};
    Conjunction c{C("val(t) = 0"), C("val(x1) >= 0"), C("val(t) - val(x1) = S - A7", p)};
    FeasibilityResult r = feasible(c);
    CHECK(r.feasible == expect);
    if (r.feasible) CHECK(oracle::satisfies(c, r.witness));
    else check_certificate(c, r.certificates.at(0));
  }
}

TEST_CASE("empty and trivial systems") {
  FeasibilityResult r = feasible(Conjunction{});
  CHECK(r.feasible);
  CHECK(r.witness.empty());
  CHECK(feasible(Conjunction{C("val(u) < inf")}).feasible);
  CHECK(feasible(Domain{{}}).feasible == false);
  CHECK(feasible(Domain::all()).feasible);
}

TEST_CASE("domain unions pick a feasible clause") {
  Domain d{{{C("val(u) = 0"), C("val(u) > 0")}, {C("val(u) >= 0"), C("val(v) > 0")}}};
  FeasibilityResult r = feasible(d);
  CHECK(r.feasible);
  CHECK(r.clause == 1);
  CHECK(d.holds({{"u", Rational(0)}, {"v", Rational(1)}}));
  CHECK_FALSE(d.holds({{"u", Rational(0)}, {"v", Rational(0)}}));
}

TEST_CASE("zero coordinates") {
  ValuationConstraint nz = C("val(u) < inf");
  CHECK_FALSE(nz.holds({{"u", ExtRational::infinity()}}));
  CHECK(nz.holds({{"u", Rational(3)}}));
  CHECK(C("val(u) >= 0").holds({{"u", ExtRational::infinity()}}));
  CHECK_FALSE(C("val(u) - val(v) = 0").holds({{"u", ExtRational::infinity()}, {"v", ExtRational::infinity()}}));
  auto vals = valuations({{"x", parse_scalar("0")}, {"y", parse_scalar("2*T^(1/3) + T")}});
  CHECK(vals.at("x").is_infinite());
  CHECK(vals.at("y") == ExtRational(Rational(1, 3)));
}

TEST_CASE("property: exact feasibility agrees with the grid oracle") {
  std::mt19937 rng(41);
  const std::vector<std::string> vars{"x", "y"};
  const Relation rels[] = {Relation::Eq, Relation::Gt, Relation::Ge, Relation::Lt, Relation::Le};
  int feasible_count = 0;
  for (int n = 0; n < 150; ++n) {
    Conjunction c;
    int m = static_cast<int>(gen::uniform(rng, 1, 4));
    for (int k = 0; k < m; ++k) {
      ValuationConstraint v;
      long a = gen::uniform(rng, -1, 1), b = gen::uniform(rng, -1, 1);
      if (a == 0 && b == 0) a = 1;
      if (a != 0) v.form["x"] = Rational(a);
      if (b != 0) v.form["y"] = Rational(b);
      v.rel = rels[gen::uniform(rng, 0, 4)];
      v.bound = Rational(gen::uniform(rng, -4, 4), 2);
      c.push_back(v);
    }
    FeasibilityResult r = feasible(c);
    bool grid = oracle::grid_feasible(c, vars, Rational(4), 12);
    REQUIRE(r.feasible == grid);
    if (r.feasible) {
      ++feasible_count;
      REQUIRE(oracle::satisfies(c, r.witness));
    } else {
      check_certificate(c, r.certificates.at(0));
    }
  }
  CHECK(feasible_count > 20);
}
