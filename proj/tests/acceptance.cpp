// Acceptance suite: one PASS/FAIL line per criterion, with timings. Exits
// nonzero when any criterion fails.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "generators.hpp"
#include "novikit/error.hpp"
#include "novikit/models.hpp"
#include "oracles.hpp"

using namespace novikit;

namespace {

// Pinned limits.
constexpr double kFastSeconds = 1.0;
constexpr double kHenselSeconds = 30.0;
const Rational kEnergy(5);
constexpr int kScalarSamples = 10000;
constexpr int kAreaSamples = 100;
constexpr int kPerturbedPotentials = 20;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail.str("");
      detail << "failed: " << what;
    }
  }
};

using Check = std::function<void(Outcome&)>;

bool same_series(const MultiSeries& a, const MultiSeries& b) {
  VarSet vars = varset_union(a.vars(), b.vars());
  return (a.with_vars(vars) - b.with_vars(vars)).is_zero();
}

bool same_map(const Assignment& a, const Assignment& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [v, s] : a)
    if (!b.count(v) || !same_series(s, b.at(v))) return false;
  return true;
}

NovikovScalar unit_value(std::mt19937& rng) {
  return NovikovScalar::monomial(gen::nonzero_gaussian(rng), Rational(0)) +
         NovikovScalar::monomial(gen::nonzero_gaussian(rng), Rational(gen::uniform(rng, 1, 6), 2));
}

// 1. The P1 fiber chart has exactly the two critical points +-T^(A_S/2).
void p1_critical_points(Outcome& o) {
  ModelBundle m = load_model("p1");
  CriticalLocus locus = critical_locus(m.atlas->chart("fiber"), CritConfig{kEnergy, {}});
  o.require(locus.points.size() == 2, "expected 2 critical points, got " + std::to_string(locus.points.size()));
  if (!o.ok) return;
  oracle::Laurent w{{1, {{Rational(0), Gaussian(1)}}}, {-1, {{Rational(1), Gaussian(1)}}}};
  int plus = 0, minus = 0;
  for (const auto& p : locus.points) {
    const NovikovScalar& t = p.coordinates.at("t");
    int sign = t.leading_coefficient() == Gaussian(1) ? 1 : -1;
    (sign > 0 ? plus : minus)++;
    NovikovScalar expected = NovikovScalar::monomial(Gaussian(sign), Rational(1, 2));
    o.require(p.lifted_to >= ExtRational(kEnergy), "lifted only to " + p.lifted_to.str());
    o.require(equal_below(t, expected, kEnergy) && t.terms() == expected.terms(), "coordinate " + t.str());
    NovikovScalar value = oracle::to_scalar(oracle::evaluate_below(w, oracle::from_scalar(expected), Rational(100)),
                                            ExtRational::infinity());
    o.require(value == NovikovScalar::monomial(Gaussian(2 * sign), Rational(1, 2)), "oracle value " + value.str());
    o.require(equal_below(p.value, value, kEnergy) && p.value.terms() == value.terms(), "critical value " + p.value.str());
  }
  o.require(plus == 1 && minus == 1, "expected one root of each sign");
  if (o.ok) o.detail << "t = +-T^(1/2), W = +-2T^(1/2), exact";
}

// 2. Four-punctured sphere gluing.
void four_punctured_gluing(Outcome& o) {
  for (auto [a, b] : {std::pair{0L, 2L}, {1L, 1L}, {2L, 0L}}) {
    Atlas atlas = load_model("four-punctured", {{"a", Rational(a)}, {"b", Rational(b)}}).atlas.value();
    for (const auto& t : atlas.transitions) {
      PotentialReport r = check_potential_match(atlas, t);
      o.require(r.ok && r.residual.is_zero(), t.id + " residual " + r.residual.str());
    }
    Transition s = compose(compose(atlas.transition("S1_C"), atlas.transition("C_Cp")), atlas.transition("Cp_S2"));
    VarSet x = make_varset({"x1", "y1", "z1"});
    Parameters p{{"a", Rational(a)}, {"b", Rational(b)}};
    Assignment expected{{"x2", parse_series("x1^-1", x)},
                        {"y2", parse_series("x1^{a}*y1", x, p)},
                        {"z2", parse_series("x1^{b}*z1", x, p)}};
    o.require(same_map(s.map, expected), "composed S1 -> S2 map for a=" + std::to_string(a));
  }
  int failing = 0;
  for (auto [a, b] : {std::pair{1L, 2L}, {0L, 0L}, {3L, 0L}, {2L, 2L}, {-1L, 1L}}) {
    Atlas atlas = load_model("four-punctured", {{"a", Rational(a)}, {"b", Rational(b)}}).atlas.value();
    PotentialReport r = check_potential_match(atlas, atlas.transition("C_Cp"));
    o.require(!r.ok && !r.residual.is_zero(), "a+b=" + std::to_string(a + b) + " should leave a residual");
    failing += r.ok ? 0 : 1;
  }
  if (o.ok) o.detail << "3 gauges match exactly; " << failing << "/5 gauges with a+b != 2 leave a residual";
}

// 3. Wall-crossing triple compatibility.
void wall_crossing_triangle(Outcome& o) {
  Atlas atlas = load_model("wall-crossing").atlas.value();
  Transition c = compose(atlas.transition("L_L1"), atlas.transition("L1_L2"));
  VarSet uv = make_varset({"u", "v"});
  o.require(same_map(c.map, {{"xp", parse_series("u*v - 1", uv)}, {"yp", parse_series("v", uv)}}),
            "compose(L_L1, L1_L2) is not {xp = uv - 1, yp = v}");
  o.require(same_map(c.map, atlas.transition("L_L2").map), "composite differs from the declared L_L2");
  CocycleReport r = verify_cocycle(atlas, atlas.loops.at(0));
  o.require(r.status == CocycleStatus::Ok, std::string("loop status ") + std::string(to_string(r.status)));
  for (const auto& [v, res] : r.residuals) o.require(res.is_zero(), "residual in " + v);
  if (o.ok) o.detail << "xp = uv - 1, yp = v; loop L -> L1 -> L2 -> L is the identity";
}

// 4. Maurer-Cartan classification and the cocycle solve.
void mc_engine(Outcome& o) {
  DiscData seidel = load_model("pants").discs.at("seidel");
  ObstructionReport s = classify_obstruction(seidel, m0_deformed(seidel));
  VarSet xyz = make_varset({"x", "y", "z"});
  o.require(s.kind == Obstruction::Weakly, "Seidel data not weakly unobstructed");
  o.require(s.potential.commutative_image(xyz) == parse_series("x*y*z", xyz), "W = " + s.potential.str());

  DiscData immersed = load_model("wall-crossing").discs.at("immersed");
  o.require(classify_obstruction(immersed, m0_deformed(immersed)).kind == Obstruction::Unobstructed,
            "immersed sphere not unobstructed");
  for (std::size_t i = 0; i < immersed.contributions.size(); ++i) {
    DiscData dropped = immersed;
    dropped.contributions.erase(dropped.contributions.begin() + static_cast<long>(i));
    o.require(classify_obstruction(dropped, m0_deformed(dropped)).kind == Obstruction::Obstructed,
              "dropping bigon " + std::to_string(i) + " did not obstruct");
  }
  DiscData seidel_dropped = seidel;
  seidel_dropped.contributions.erase(seidel_dropped.contributions.begin() + 1);
  o.require(classify_obstruction(seidel_dropped, m0_deformed(seidel_dropped)).kind == Obstruction::Obstructed,
            "dropping the cancelling Seidel triangle did not obstruct");

  DiscData strips = load_model("wall-crossing").discs.at("strips");
  VarSet vars = strips.variables();
  std::map<std::string, MultiSeries> eqs;
  for (const auto& [g, w] : m1_between(strips, "alpha0")) eqs[g] = w.commutative_image(vars);
  CocycleSolution sol = solve_cocycle(eqs, {"y", "x"});
  std::map<VarName, MultiSeries> got(sol.relations.begin(), sol.relations.end());
  o.require(got.count("y") && got.at("y") == parse_series("u^-1", vars), "y relation");
  o.require(got.count("x") && got.at("x") == parse_series("u*v - 1", vars), "x relation");
  if (o.ok) o.detail << "W = xyz; immersed unobstructed, flips when a bigon is removed; y = u^-1, x = uv - 1";
}

// 5. Valuation feasibility.
void feasibility(Outcome& o) {
  ModelBundle paradox = load_model("paradox");
  FeasibilityResult regions = feasible(paradox.constraints_with("regions", {}));
  o.require(!regions.feasible, "regions feasible");
  o.require(regions.certificates.size() == 1 && regions.certificates[0].size() == 2, "certificate size");

  std::mt19937 rng(5005);
  int agree = 0, feasible_cases = 0;
  for (int n = 0; n < kAreaSamples; ++n) {
    Parameters p;
    Rational sum(0);
    for (int i = 1; i <= 5; ++i) {
      Rational a(gen::uniform(rng, 1, 4), gen::uniform(rng, 1, 4));
      p["A" + std::to_string(i)] = a;
      sum += a;
    }
    Rational a7 = n % 10 == 0 ? sum : Rational(gen::uniform(rng, 1, 24), gen::uniform(rng, 1, 4));
    p["A7"] = a7;
    bool expected = sum <= a7;

    Atlas atlas = paradox.atlas_with(p);
    ChainConstraints cc = chain_constraints(atlas, {"S1x_C"}, true);
    FeasibilityResult overlap = feasible(cc.domain);
    FeasibilityResult criterion = feasible(paradox.constraints_with("criterion", p));

    Rational gap = sum - a7;
    Rational radius = Rational(2) + (gap.sign() < 0 ? -gap : gap);
    bool grid = false;
    for (const auto& clause : cc.domain.clauses) {
      VarSet vars;
      for (const auto& c : clause) vars = varset_union(vars, c.vars());
      grid = grid || oracle::grid_feasible(clause, std::vector<std::string>(vars.begin(), vars.end()), radius, 12);
    }
    bool ok = overlap.feasible == expected && criterion.feasible == expected && grid == expected;
    o.require(ok, "areas with sum " + sum.str() + ", A7 " + a7.str());
    agree += ok ? 1 : 0;
    feasible_cases += expected ? 1 : 0;
  }
  if (o.ok)
    o.detail << "2-constraint certificate; " << agree << "/" << kAreaSamples << " area vectors agree with the grid oracle ("
             << feasible_cases << " feasible)";
}

// 6. Novikov arithmetic properties.
void novikov_properties(Outcome& o) {
  std::mt19937 rng(6006);
  auto neg = [](const NovikovScalar& s) { return s.is_zero() ? Rational(0) : std::min(Rational(0), s.val().value()); };
  int failures = 0;
  for (int n = 0; n < kScalarSamples; ++n) {
    NovikovScalar a = gen::scalar(rng, 4, false), b = gen::scalar(rng, 4, false), c = gen::scalar(rng);
    bool ok = true;
    NovikovScalar p = a * b;
    Rational vab = a.val().value() + b.val().value();
    if (ExtRational(vab) < p.cutoff()) ok = ok && p.val() == ExtRational(vab);
    NovikovScalar s = a + b;
    ExtRational lo = min(a.val(), b.val());
    ok = ok && s.val() >= lo;
    if (a.val() != b.val() && lo < s.cutoff()) ok = ok && s.val() == lo;
    ExtRational window = min(min(a.cutoff(), b.cutoff()), c.cutoff()) + (neg(a) + neg(b) + neg(c));
    ok = ok && a + b == b + a && a * b == b * a && (a + b) + c == a + (b + c);
    ok = ok && equal_below((a * b) * c, a * (b * c), window);
    ok = ok && equal_below(a * (b + c), a * b + a * c, window);
    // The inverse loses 2*val(a) of precision; a cutoff of val + |val| + 3
    // leaves a window of 3 above the constant term.
    Rational v = a.val().value();
    NovikovScalar f = a.with_cutoff(ExtRational(v + (v.sign() < 0 ? -v : v) + Rational(3)));
    NovikovScalar one = f * f.invert();
    ok = ok && equal_below(one, NovikovScalar(1), one.cutoff()) && one.cutoff() >= ExtRational(Rational(3));
    if (a.cutoff().is_finite()) {
      NovikovScalar own = a * a.invert();
      ok = ok && equal_below(own, NovikovScalar(1), own.cutoff());
    }
    if (!ok) ++failures;
    o.require(ok, "sample " + std::to_string(n) + ": a = " + a.str() + ", b = " + b.str() + ", c = " + c.str());
  }
  if (o.ok) o.detail << kScalarSamples << " samples, " << failures << " failures";
}

// 7. Hensel lifting against undetermined coefficients.
void hensel_vs_oracle(Outcome& o) {
  std::mt19937 rng(7007);
  VarSet t = make_varset({"t"});
  int roots = 0;
  for (int n = 0; n < kPerturbedPotentials; ++n) {
    Rational a(gen::uniform(rng, 1, 4), gen::uniform(rng, 1, 2));
    MultiSeries w = parse_series("t + T^{A}*t^-1", t, {{"A", a}});
    int extra = static_cast<int>(gen::uniform(rng, 1, 3));
    for (int k = 0; k < extra; ++k) {
      long power = gen::uniform(rng, -2, 3);
      // Strictly above the edge through (1, 0) and (-1, A), so the two roots
      // near +-T^(A/2) survive.
      Rational lift(gen::uniform(rng, 1, 8), gen::uniform(rng, 1, 3));
      Rational e = lift + (power < 1 ? Rational(1 - power) * a / Rational(2) : Rational(0));
      w += MultiSeries::term(t, Monomial::var("t", power), NovikovScalar::monomial(gen::nonzero_gaussian(rng, false), e));
    }
    MultiSeries dw = partial_derivative(w, "t");
    CriticalLocus locus = critical_locus(Chart{"c", t, Domain::all(), w}, CritConfig{kEnergy, {}});
    o.require(locus.points.size() >= 2, "potential " + w.str() + " lost its roots");
    oracle::Laurent f;
    for (const auto& [m, c] : dw.terms()) f[m.exponent("t")] = oracle::from_scalar(c);
    mpz_class den = 2 * a.den();
    for (const auto& [m, c] : dw.terms())
      for (const auto& term : c.terms()) den = lcm(den, term.exponent.den());
    for (const auto& p : locus.points) {
      const NovikovScalar& root = p.coordinates.at("t");
      o.require(p.lifted_to >= ExtRational(kEnergy), "root of " + w.str() + " lifted only to " + p.lifted_to.str());
      Rational e0 = root.val().value();
      long grid = mpz_class(lcm(den, e0.den())).get_si();
      oracle::Coeffs expected = oracle::root_by_coefficients(f, e0, root.leading_coefficient(), grid, kEnergy);
      o.require(equal_below(root, oracle::to_scalar(expected, kEnergy), kEnergy),
                "root " + root.str() + " of " + w.str() + " differs from the oracle");
      ++roots;
    }
  }
  if (o.ok) o.detail << kPerturbedPotentials << " potentials, " << roots << " roots match term by term below T^5";
}

// 8. Relations from the cocycle solve glue charts; critical points transport
// to critical points with equal values.
void cross_module(Outcome& o) {
  ModelBundle m = load_model("four-punctured");
  const Atlas& atlas = *m.atlas;
  DiscData d = m.discs.at("cocycle");
  VarSet vars = d.variables();
  std::map<std::string, MultiSeries> eqs;
  for (const auto& [g, w] : m1_between(d, "a1")) eqs[g] = w.commutative_image(vars);
  CocycleSolution sol = solve_cocycle(eqs, {"x1", "y1", "z1"});

  // The relations express S1 coordinates through C coordinates: a gluing C -> S1.
  Transition glue;
  glue.id = "extracted";
  glue.source = "C";
  glue.target = "S1";
  glue.source_vars = atlas.chart("C").vars;
  glue.target_vars = atlas.chart("S1").vars;
  glue.overlap = Domain::of({ValuationConstraint::on("t", Relation::Eq, Rational(0))});
  for (const auto& [v, s] : sol.relations) glue.map[v] = s.with_vars(glue.source_vars);
  PotentialReport match = check_potential_match(atlas, glue);
  o.require(match.ok, "extracted gluing leaves residual " + match.residual.str());
  o.require(same_map(glue.map, atlas.transition("S1_C").inverse.value()), "extracted gluing differs from S1_C^-1");

  std::vector<std::string> chain{"S1_C", "C_Cp", "Cp_S2"};
  for (const auto& step : chain) o.require(check_potential_match(atlas, atlas.step(step)).ok, step + " not validated");

  // Samples carry a finite cutoff, so the comparisons are modulo T^5 and
  // require every result to be known at least that far.
  const ExtRational known(kEnergy);
  auto negligible = [&](const NovikovScalar& s) { return s.cutoff() >= known && equal_below(s, NovikovScalar(), known); };
  auto gradient_vanishes = [&](const Chart& chart, const Point& p) {
    for (const auto& v : chart.vars)
      if (!negligible(evaluate(partial_derivative(chart.potential, v), p))) return false;
    return true;
  };
  CriticalLocus locus = critical_locus(atlas.chart("S1"));
  std::mt19937 rng(8008);
  int transported = 0;
  for (const auto& comp : locus.components) {
    // Sample the component inside the S1 -> C overlap (val(x1) = 0).
    if (std::find(comp.zero_vars.begin(), comp.zero_vars.end(), "x1") != comp.zero_vars.end()) continue;
    for (int k = 0; k < 5; ++k) {
      Point p;
      for (const auto& v : atlas.chart("S1").vars) p[v] = NovikovScalar();
      for (const auto& v : comp.free_vars) p[v] = (v == "x1" ? unit_value(rng) : gen::scalar(rng, 2)).with_cutoff(ExtRational(Rational(20)));
      o.require(gradient_vanishes(atlas.chart("S1"), p), "sample is not critical");
      NovikovScalar value = evaluate(atlas.chart("S1").potential, p);
      Point q = p;
      std::string chart = "S1";
      for (const auto& step : chain) {
        Transition t = atlas.step(step);
        q = transport_point(atlas, q, t).point;
        chart = t.target;
        o.require(gradient_vanishes(atlas.chart(chart), q), "image in " + chart + " is not critical");
        o.require(negligible(evaluate(atlas.chart(chart).potential, q) - value), "critical value changed in " + chart);
      }
      Point back = transport_point(atlas, transport_point(atlas, p, atlas.transition("S1_C")).point, glue).point;
      for (const auto& [v, s] : p) o.require(negligible(back.at(v) - s), "extracted gluing moves " + v);
      ++transported;
    }
  }
  o.require(transported > 0, "no critical sample inside the overlap");
  if (o.ok)
    o.detail << "x1 = t, y1 = y0, z1 = z0 matches W; " << transported
             << " critical samples transported S1 -> C -> C' -> S2 with equal values";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Check run;
    double limit;
  };
  const Criterion criteria[] = {
      {1, "P1 critical locus", p1_critical_points, kFastSeconds},
      {2, "four-punctured sphere gluing", four_punctured_gluing, kFastSeconds},
      {3, "wall-crossing triple compatibility", wall_crossing_triangle, kFastSeconds},
      {4, "Maurer-Cartan engine", mc_engine, 0},
      {5, "valuation feasibility", feasibility, 0},
      {6, "Novikov arithmetic properties", novikov_properties, 0},
      {7, "Hensel lifting vs oracle", hensel_vs_oracle, kHenselSeconds},
      {8, "cross-module gluing and transport", cross_module, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail.str("");
      o.detail << "threw " << e.what();
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit > 0 && seconds >= c.limit) {
      o.ok = false;
      o.detail << " (over the " << c.limit << " s limit)";
    }
    failed += o.ok ? 0 : 1;
    std::cout << (o.ok ? "[PASS] " : "[FAIL] ") << c.id << ". " << c.name << ": " << o.detail.str() << " ("
              << std::fixed << std::setprecision(3) << seconds << " s)\n";
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
  return failed == 0 ? 0 : 1;
}
