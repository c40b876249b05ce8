#pragma once

#include <optional>
#include <string>
#include <vector>

#include "novikit/valuation.hpp"

namespace novikit {

/// A coordinate patch: variables, a valuation domain and a potential.
struct Chart {
  std::string name;
  VarSet vars;
  Domain domain;
  MultiSeries potential;
};

/// Gluing map from `source` to `target`: every target variable is a series in
/// the source variables, defined on `overlap` (a domain on source variables).
/// The optional declared inverse maps source variables to series in the
/// target variables on `inverse_overlap`.
struct Transition {
  std::string id;
  std::string source;
  std::string target;
  VarSet source_vars;
  VarSet target_vars;
  Domain overlap;
  Assignment map;
  std::optional<Assignment> inverse;
  Domain inverse_overlap;
  /// Set when the overlap only over-approximates the true domain (some
  /// constraint could not be pulled back exactly).
  bool approximate_overlap = false;
};

struct Atlas {
  std::vector<Chart> charts;
  std::vector<Transition> transitions;
  /// Closed chains of transition steps; a step is a transition id, "id^-1"
  /// for its declared inverse, or "identity:CHART".
  std::vector<std::vector<std::string>> loops;

  /// Throws UnknownChart.
  const Chart& chart(const std::string& name) const;
  /// Throws UnknownTransition.
  const Transition& transition(const std::string& id) const;
  /// Resolves one loop step (see `loops`).
  Transition step(const std::string& step) const;
  /// Copy with every potential and map series truncated to the cutoffs.
  Atlas with_cutoffs(const ExtRational& energy, const DegreeCutoff& degree) const;
};

Transition identity_transition(const Chart& chart);
/// The declared inverse as a transition target -> source; throws
/// InvalidArgument when none is declared.
Transition inverse_transition(const Transition& t);

struct PotentialReport {
  bool ok = false;
  /// W_source - W_target(map).
  MultiSeries residual;
};

PotentialReport check_potential_match(const Atlas& atlas, const Transition& t);

/// t1 followed by t2. Throws ChartMismatch unless t1.target == t2.source.
/// The overlap is t1.overlap together with t2.overlap pulled back along
/// t1.map; constraints whose variables have multi-term images cannot be
/// pulled back exactly and are dropped, marking the result approximate.
Transition compose(const Transition& t1, const Transition& t2);

/// Pullback of a domain on `map`'s target variables to the source variables.
Domain pullback(const Domain& d, const Assignment& map, bool& approximate);

enum class CocycleStatus { Ok, Failed, EmptyOverlap };
std::string_view to_string(CocycleStatus s);

struct CocycleReport {
  CocycleStatus status = CocycleStatus::Failed;
  Transition composed;
  /// map[v] - v for every variable of the base chart.
  std::map<VarName, MultiSeries> residuals;
  /// Feasibility of the composed overlap (declared overlaps only, so Lambda
  /// points with any valuation count).
  FeasibilityResult overlap_feasibility;
  /// Feasibility when every chart along the loop also imposes its domain.
  FeasibilityResult honest_feasibility;
  /// True when some overlap or valuation relation was over-approximated.
  bool approximate = false;
};

/// Composes the steps of a closed loop and compares the result with the
/// identity symbolically. An infeasible common overlap is reported as
/// EmptyOverlap rather than as a failure.
CocycleReport verify_cocycle(const Atlas& atlas, const std::vector<std::string>& loop);

struct ChainConstraints {
  /// Constraints on qualified variables "v@k" (v on the k-th chart of the
  /// chain, k = 0 for the first source).
  Domain domain;
  bool approximate = false;
};

/// Valuation relations along a chain of steps: each step's overlap, and for
/// each map entry w = c*m (one term) the equation val(w) = val(c) + val(m);
/// a multi-term entry only gives val(w) >= min over its terms and marks the
/// result approximate. With `honest`, every chart's domain is added too.
ChainConstraints chain_constraints(const Atlas& atlas, const std::vector<std::string>& steps, bool honest);

struct TransportResult {
  Point point;
  /// Both the input and the image lie in their chart domains; otherwise the
  /// point is a pseudo point (Lambda-valued, outside the honest domain).
  bool honest = false;
};

/// Evaluates the transition map at p. Throws OutsideOverlap naming the
/// violated overlap constraint, or when the map is undefined at p.
TransportResult transport_point(const Atlas& atlas, const Point& p, const Transition& t);

}  // namespace novikit
