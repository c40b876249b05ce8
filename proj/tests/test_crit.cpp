#include <doctest.h>

#include "generators.hpp"
#include "novikit/error.hpp"
#include "novikit/models.hpp"
#include "oracles.hpp"

using namespace novikit;

namespace {

const VarSet kT = make_varset({"t"});

MultiSeries P(const char* text, const VarSet& vars = kT, const Parameters& params = {}) {
  return parse_series(text, vars, params);
}

template <class F>
ErrorKind error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

oracle::Laurent as_laurent(const MultiSeries& f, const VarName& t) {
  oracle::Laurent out;
  for (const auto& [m, c] : f.terms()) out[m.exponent(t)] = oracle::from_scalar(c);
  return out;
}

long grid_for(const MultiSeries& f, const Rational& e0) {
  mpz_class d = e0.den();
  for (const auto& [m, c] : f.terms())
    for (const auto& term : c.terms()) d = lcm(d, term.exponent.den());
  return 2 * d.get_si();
}

Chart chart_of(const MultiSeries& w, Domain domain = Domain::all()) { return Chart{"c", w.vars(), std::move(domain), w}; }

}  // namespace

TEST_CASE("Newton polygon leading terms") {
  NewtonResult r = newton_leading(P("1 - T*t^-2"), "t");
  REQUIRE(r.roots.size() == 2);
  std::set<std::string> coeffs;
  for (const auto& root : r.roots) {
    CHECK(root.exponent == Rational(1, 2));
    CHECK(root.multiplicity == 1);
    coeffs.insert(root.coefficient.str());
  }
  CHECK(coeffs == std::set<std::string>{"1", "-1"});

  NewtonResult z = newton_leading(P("t"), "t");
  CHECK(z.zero_root);
  CHECK(z.roots.empty());
  CHECK(error_of([] { return newton_leading(P("1"), "t"); }) == ErrorKind::NoRoots);

  // t^2 + T^2 has roots +-i*T over the Gaussian rationals; t^2 - 2T does not.
  CHECK(newton_leading(P("t^2 + T^2"), "t").roots.size() == 2);
  NewtonResult sym = newton_leading(P("t^2 - 2*T"), "t");
  CHECK(sym.roots.empty());
  REQUIRE(sym.unresolved.size() == 1);
  CHECK(sym.unresolved[0].exponent == Rational(1, 2));
}

TEST_CASE("Hensel lifting") {
  Point start{{"t", parse_scalar("T^(1/2)")}};
  HenselResult exact = hensel_lift({P("1 - T*t^-2")}, {"t"}, start, Rational(5));
  CHECK(exact.solution.at("t") == parse_scalar("T^(1/2)"));
  CHECK(exact.lifted_to.is_infinite());

  // Corrections against the undetermined-coefficients oracle.
  MultiSeries f = P("1 - T*t^-2 + T^2*t^-1");
  HenselResult lifted = hensel_lift({f}, {"t"}, start, Rational(3));
  CHECK(lifted.lifted_to >= ExtRational(Rational(3)));
  oracle::Coeffs root = oracle::root_by_coefficients(as_laurent(f, "t"), Rational(1, 2), Gaussian(1), 2, Rational(3));
  CHECK(equal_below(lifted.solution.at("t"), oracle::to_scalar(root, Rational(3)), Rational(3)));
  CHECK(lifted.solution.at("t").coefficient(Rational(2)) == Gaussian(Rational(-1, 2)));

  CHECK(error_of([] { return hensel_lift({P("t^2 - 2*t + 1")}, {"t"}, {{"t", NovikovScalar(1)}}, Rational(3)); }) ==
        ErrorKind::SingularJacobian);
}

TEST_CASE("P1 critical points") {
  ModelBundle p1 = load_model("p1");
  CriticalLocus locus = critical_locus(p1.atlas->chart("fiber"), CritConfig{Rational(5), {}});
  REQUIRE(locus.points.size() == 2);
  std::set<std::string> coords, values;
  for (const auto& p : locus.points) {
    coords.insert(p.coordinates.at("t").str());
    values.insert(p.value.str());
    CHECK(p.lifted_to.is_infinite());
  }
  CHECK(coords == std::set<std::string>{"T^(1/2)", "-T^(1/2)"});
  CHECK(values == std::set<std::string>{"2*T^(1/2)", "-2*T^(1/2)"});

  ModelBundle large = load_model("p1", {{"A_S", Rational(2)}});
  CriticalLocus outside = critical_locus(large.atlas->chart("fiber"), CritConfig{Rational(5), {}});
  CHECK(outside.points.empty());
  CHECK(outside.excluded.size() == 2);
}

TEST_CASE("pair of pants components") {
  VarSet xyz = make_varset({"x", "y", "z"});
  CriticalLocus locus = critical_locus(chart_of(P("x*y*z", xyz)));
  CHECK(locus.points.empty());
  std::set<VarSet> zero_sets;
  for (const auto& c : locus.components) zero_sets.insert(c.zero_vars);
  CHECK(zero_sets == std::set<VarSet>{{"x", "y"}, {"y", "z"}, {"x", "z"}});
}

TEST_CASE("constant potential") {
  VarSet uv = make_varset({"u", "v"});
  CriticalLocus locus = critical_locus(chart_of(P("T + 2", uv)));
  REQUIRE(locus.components.size() == 1);
  CHECK(locus.components[0].zero_vars.empty());
  CHECK(locus.components[0].free_vars == uv);
}

TEST_CASE("separable and seeded potentials") {
  VarSet xy = make_varset({"x", "y"});
  CriticalLocus sep = critical_locus(chart_of(P("x + T*x^-1 + y + T^3*y^-1", xy)), CritConfig{Rational(5), {}});
  CHECK(sep.points.size() == 4);

  MultiSeries mixed = P("x*y + x", xy);
  CHECK(error_of([&] { return critical_locus(chart_of(mixed)); }) == ErrorKind::UnsupportedPotential);
  CriticalLocus seeded = critical_locus(chart_of(mixed), CritConfig{Rational(5), {{{"x", NovikovScalar()}, {"y", NovikovScalar(-1)}}}});
  REQUIRE(seeded.points.size() == 1);
  CHECK(seeded.points[0].coordinates.at("y") == NovikovScalar(-1));
  CHECK(seeded.points[0].coordinates.at("x").is_zero());
}

TEST_CASE("degenerate roots are reported, not lifted") {
  CriticalLocus locus = critical_locus(chart_of(P("t^3/3 - t^2 + t")));
  CHECK(locus.points.empty());
  REQUIRE(locus.degenerate.size() == 1);
  CHECK(locus.degenerate[0].multiplicity == 2);
}

TEST_CASE("property: gradients vanish at returned points") {
  std::mt19937 rng(71);
  for (int n = 0; n < 25; ++n) {
    Rational a(gen::uniform(rng, 1, 3));
    MultiSeries w = P("t + T^{A}*t^-1", kT, {{"A", a}});
    for (int k = 0; k < 2; ++k) {
      long power = gen::uniform(rng, -2, 3);
      // Above the polygon edge at slope A/2, so it perturbs without adding roots near it.
      Rational e = Rational(gen::uniform(rng, 1, 6), 2) + (power < 1 ? Rational(1 - power) * a / Rational(2) : Rational(0));
      w += MultiSeries::term(kT, Monomial::var("t", power), NovikovScalar::monomial(gen::nonzero_gaussian(rng, false), e));
    }
    CriticalLocus locus = critical_locus(chart_of(w), CritConfig{Rational(5), {}});
    MultiSeries dw = partial_derivative(w, "t");
    INFO(w.str());
    CHECK(locus.points.size() >= 2);
    for (const auto& p : locus.points) {
      // Evaluate at the returned terms with a wide window so that negative
      // powers do not eat into the precision being checked.
      Point wide{{"t", p.coordinates.at("t").with_cutoff(Rational(40))}};
      NovikovScalar g = evaluate(dw, wide);
      CHECK(g.cutoff() > ExtRational(Rational(5)));
      CHECK(g.val() >= ExtRational(Rational(5)));
      CHECK(g.val() >= p.residual_valuation);
      Rational e0 = p.coordinates.at("t").val().value();
      oracle::Coeffs root = oracle::root_by_coefficients(as_laurent(dw, "t"), e0,
                                                         p.coordinates.at("t").leading_coefficient(), grid_for(dw, e0),
                                                         Rational(5));
      CHECK(equal_below(p.coordinates.at("t"), oracle::to_scalar(root, Rational(5)), min(p.lifted_to, Rational(5))));
      CHECK(p.lifted_to >= ExtRational(Rational(5)));
    }
  }
}

TEST_CASE("roots deeper than the target energy") {
  // One root sits near -6*T^8, below the T^5 target.
  MultiSeries w = P("3*T^12*t^-2 + T^4*t^-1 + t - 5*T^(1/3)*t^3");
  CriticalLocus locus = critical_locus(chart_of(w), CritConfig{Rational(5), {}});
  bool deep = false;
  for (const auto& p : locus.points) {
    CHECK(p.lifted_to >= ExtRational(Rational(5)));
    const NovikovScalar& t = p.coordinates.at("t");
    if (t.val() == ExtRational(Rational(8))) {
      deep = true;
      CHECK(t.leading_coefficient() == Gaussian(-6));
    }
  }
  CHECK(deep);
}
