#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "novikit/multiseries.hpp"

namespace novikit {

enum class Relation { Eq, Gt, Ge, Lt, Le };

std::string_view to_string(Relation r);
/// Accepts "=", "==", ">", ">=", "<", "<=".
Relation parse_relation(std::string_view text);

/// sum_i n_i*val(v_i) + c  rel  bound.
///
/// The bound may be +inf only with '<'; "val(v) < inf" states that v is
/// nonzero. All other constraints are linear conditions on finite valuations.
struct ValuationConstraint {
  std::map<VarName, Rational> form;
  Rational constant;
  Relation rel = Relation::Ge;
  ExtRational bound = Rational(0);

  /// Single-variable constraint val(v) rel bound.
  static ValuationConstraint on(const VarName& v, Relation rel, ExtRational bound);

  bool nonzero_condition() const { return bound.is_infinite(); }
  VarSet vars() const;
  /// Truth value at a point given by valuations (+inf allowed for zero
  /// coordinates). An undefined left side (inf - inf) counts as violated.
  bool holds(const std::map<VarName, ExtRational>& vals) const;
  /// "val(t) - val(x1) + 1/2 >= 0".
  std::string str() const;

  friend bool operator==(const ValuationConstraint&, const ValuationConstraint&) = default;
};

using Conjunction = std::vector<ValuationConstraint>;

/// Finite union of conjunctions. The default value is the single empty
/// conjunction, i.e. the whole space; a union with no clauses is empty.
struct Domain {
  std::vector<Conjunction> clauses{Conjunction{}};

  static Domain all() { return Domain{}; }
  static Domain of(Conjunction c) { return Domain{{std::move(c)}}; }

  bool is_everything() const { return clauses.size() == 1 && clauses.front().empty(); }
  bool holds(const std::map<VarName, ExtRational>& vals) const;
  /// First constraint that fails in every clause, for diagnostics: returns the
  /// failing constraint of the clause that comes closest (fewest failures).
  std::optional<ValuationConstraint> first_violation(const std::map<VarName, ExtRational>& vals) const;
  VarSet vars() const;
  std::string str() const;

  friend bool operator==(const Domain&, const Domain&) = default;
};

/// Conjunction of two domains, distributed over their clauses.
Domain intersect(const Domain& a, const Domain& b);

/// Valuations of a point's coordinates (+inf for zero coordinates).
std::map<VarName, ExtRational> valuations(const Point& p);

struct FeasibilityResult {
  bool feasible = false;
  /// Finite valuation assignment satisfying the constraints (variables not
  /// mentioned anywhere are set to 0).
  std::map<VarName, Rational> witness;
  /// Index of the satisfiable clause (domain feasibility only).
  std::size_t clause = 0;
  /// Irreducible infeasible subsets, one per clause, when infeasible.
  std::vector<Conjunction> certificates;
};

/// Exact feasibility of a conjunction over finite rational valuations, by
/// Fourier-Motzkin elimination with strictness tracking. An infeasible
/// result carries an irreducible infeasible subset of the input constraints.
FeasibilityResult feasible(const Conjunction& constraints);
/// Feasible iff some clause is.
FeasibilityResult feasible(const Domain& domain);

}  // namespace novikit
