#pragma once

#include <optional>
#include <string>
#include <vector>

#include "novikit/atlas.hpp"

namespace novikit {

/// Leading term c*T^e of a root over the Novikov field.
struct LeadingRoot {
  Rational exponent;
  Gaussian coefficient;
  /// Multiplicity as a root of the edge polynomial.
  int multiplicity = 1;
};

/// Part of an edge polynomial with no roots over the Gaussian rationals:
/// roots t ~ z*T^exponent where z runs over the roots of the polynomial.
struct SymbolicRoot {
  Rational exponent;
  /// Coefficients, constant term first.
  std::vector<Gaussian> polynomial;
  std::string str() const;
};

struct NewtonResult {
  std::vector<LeadingRoot> roots;
  std::vector<SymbolicRoot> unresolved;
  /// t = 0 solves f = 0 (f has no negative powers and no constant part).
  bool zero_root = false;
};

/// Leading terms of the nonzero roots of a univariate Laurent series f in t,
/// read off the lower convex hull of the points (k, val(a_k)) where
/// f = sum_k a_k t^k. Throws NoRoots when f has neither.
NewtonResult newton_leading(const MultiSeries& f, const VarName& t);

struct HenselResult {
  Point solution;
  /// Coordinates are exact below this energy (+inf when exact).
  ExtRational lifted_to;
  /// Lower bound for the valuation of the residual at `solution`.
  ExtRational residual_valuation;
  int iterations = 0;
};

/// Multivariate Newton iteration over the Novikov field from a leading
/// solution until the roots are certified below `target`. Throws
/// SingularJacobian when the Jacobian degenerates.
HenselResult hensel_lift(const std::vector<MultiSeries>& equations, const std::vector<VarName>& unknowns,
                         const Point& start, const ExtRational& target);

struct CriticalPoint {
  Point coordinates;
  NovikovScalar value;
  ExtRational lifted_to;
  ExtRational residual_valuation;
  int iterations = 0;
};

/// Coordinate subspace {v = 0 for v in zero_vars}; the remaining variables
/// are free.
struct CriticalComponent {
  VarSet zero_vars;
  VarSet free_vars;
  std::string str() const;
};

struct CritConfig {
  /// Defaults to the potential's energy cutoff, or 5 when it has none.
  std::optional<ExtRational> target_energy;
  /// Starting points for potentials of no special shape.
  std::vector<Point> seeds;
};

struct CriticalLocus {
  std::vector<CriticalPoint> points;
  /// Critical points outside the chart domain.
  std::vector<CriticalPoint> excluded;
  std::vector<CriticalComponent> components;
  std::vector<CriticalComponent> excluded_components;
  /// Leading terms of multiple roots, which are reported but not lifted.
  std::vector<LeadingRoot> degenerate;
  std::vector<SymbolicRoot> unresolved;
  /// Chart variables the potential does not involve.
  VarSet free_vars;
  ExtRational target;
};

/// Critical locus of the chart's potential. Supported shapes: constant,
/// univariate Laurent, a single monomial, a sum of univariate parts, or any
/// potential when seeds are supplied. Throws UnsupportedPotential otherwise.
CriticalLocus critical_locus(const Chart& chart, const CritConfig& config = {});

/// Whether some assignment of the free variables puts the partially known
/// valuations inside the domain.
bool domain_admits(const Domain& d, const std::map<VarName, ExtRational>& known);

}  // namespace novikit
