#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "novikit/multiseries.hpp"

namespace novikit {

enum class Parity { Even, Odd };
enum class GeneratorKind { Unit, Point, Immersed, Intersection, Morse };

std::string_view to_string(Parity p);
std::string_view to_string(GeneratorKind k);
Parity parse_parity(std::string_view text);
GeneratorKind parse_generator_kind(std::string_view text);

struct Generator {
  std::string name;
  Parity parity = Parity::Odd;
  GeneratorKind kind = GeneratorKind::Immersed;
  /// The decorated object (Lagrangian) the generator belongs to.
  std::string object;
};

/// Crossing of a gauge cycle: multiplies the contribution by var^power.
struct HolonomyFactor {
  VarName var;
  long power = 1;
};

/// One rigid polygon: inputs at the corners in boundary order, an output
/// generator, its symplectic area, a sign and its gauge crossings.
struct DiscContribution {
  std::vector<std::string> corners;
  std::string output;
  Rational area;
  int sign = 1;
  std::vector<HolonomyFactor> holonomy;
};

/// b = sum_X var(X)*X over the odd generators listed here.
struct DeformationData {
  std::map<std::string, VarName> variables;
  /// With false, coefficient words keep their order.
  bool commutative = true;
};

struct DiscData {
  std::vector<Generator> generators;
  DeformationData deformation;
  std::vector<DiscContribution> contributions;
  /// Pairs of objects the data relates (informational).
  std::vector<std::pair<std::string, std::string>> object_pairs;

  /// Throws InvalidArgument for an unknown name.
  const Generator& generator(const std::string& name) const;
  /// Deformation and holonomy variables, sorted.
  VarSet variables() const;
};

/// Coefficient key: an ordered word of deformation variables (empty in
/// commutative mode) times a commutative monomial.
struct WordKey {
  std::vector<VarName> word;
  Monomial monomial;
  friend auto operator<=>(const WordKey&, const WordKey&) = default;
  friend bool operator==(const WordKey&, const WordKey&) = default;
};

/// Series whose coefficients may be noncommutative words.
class WordSeries {
 public:
  void add(const WordKey& key, const NovikovScalar& c);
  WordSeries& operator+=(const WordSeries& o);
  bool is_zero() const { return terms_.empty(); }
  bool is_commutative() const;
  const std::map<WordKey, NovikovScalar>& terms() const { return terms_; }
  /// Image under letting all variables commute.
  MultiSeries commutative_image(const VarSet& vars) const;
  /// Words print in order separated by '.', e.g. "T^2*z.y.x".
  std::string str() const;

 private:
  std::map<WordKey, NovikovScalar> terms_;
};

using Outputs = std::map<std::string, WordSeries>;

struct Cutoffs {
  ExtRational energy = ExtRational::infinity();
  DegreeCutoff degree;
};

/// Sums sign*T^area*holonomy*word over the contributions whose
/// non-deformation corners match `inputs` slot by slot (slot i accepts any
/// generator listed in inputs[i]). The word lists the deformation variables
/// of the remaining corners read from the last corner to the first.
/// Contributions at or above the energy cutoff or of coefficient degree above
/// the degree cutoff are skipped. Every generator appears in the result.
Outputs apply_operation(const DiscData& data, const std::vector<std::vector<std::string>>& inputs,
                        const Cutoffs& cutoffs = {});

/// m_0^b: contributions without non-deformation corners.
Outputs m0_deformed(const DiscData& data, const Cutoffs& cutoffs = {});
/// m_1^{b,b'}(source): the Floer differential of one generator.
Outputs m1_between(const DiscData& data, const std::string& source, const Cutoffs& cutoffs = {});

enum class Obstruction { Unobstructed, Weakly, Obstructed };
std::string_view to_string(Obstruction o);

struct ObstructionReport {
  Obstruction kind = Obstruction::Unobstructed;
  /// Potential (unit coefficient) when weakly unobstructed.
  WordSeries potential;
  std::string unit;
  /// Nonzero non-unit components when obstructed.
  Outputs residue;
};

ObstructionReport classify_obstruction(const DiscData& data, const Outputs& m0);

using Relations = std::vector<std::pair<VarName, MultiSeries>>;

struct CocycleSolution {
  /// unknown = series, solved in order and fully back-substituted.
  Relations relations;
  /// Input equations after substituting every relation (zero on success).
  std::map<std::string, MultiSeries> residual;
};

/// Solves the equations eqs[g] = 0 for the unknowns in order: each unknown
/// takes the first remaining equation that is affine in it with an
/// invertible coefficient, and the solution is substituted everywhere.
/// Throws NotSolvable when no such equation exists.
CocycleSolution solve_cocycle(const std::map<std::string, MultiSeries>& eqs, const std::vector<VarName>& unknowns);

/// Applies relations (unknown -> series) to s.
MultiSeries apply_relations(const MultiSeries& s, const Relations& relations);

struct CompositionCheck {
  bool ok = false;
  std::string expected;
  /// c*T^e multiplying the expected generator when ok.
  std::optional<NovikovScalar> factor;
  /// Every output after substituting the relations.
  std::map<std::string, MultiSeries> outputs;
  std::string reason;
};

struct IsomorphismReport {
  bool ok = false;
  CompositionCheck forward;
  std::optional<CompositionCheck> backward;
};

/// Checks that m_2(inputs) under the relations is c*T^e times the expected
/// output generator (a unit when `expected` is empty) and that every other
/// output vanishes. The backward data, when given, is checked the same way
/// with its own inputs.
IsomorphismReport check_isomorphism_pair(const DiscData& forward, const std::vector<std::vector<std::string>>& fwd_inputs,
                                         const DiscData* backward,
                                         const std::vector<std::vector<std::string>>& bwd_inputs,
                                         const Relations& relations, const std::string& expected = "",
                                         const Cutoffs& cutoffs = {});

}  // namespace novikit
