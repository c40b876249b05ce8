#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "novikit/novikov.hpp"

namespace novikit {

using VarName = std::string;
/// Sorted, duplicate-free list of variable names.
using VarSet = std::vector<VarName>;

VarSet make_varset(std::vector<VarName> names);
VarSet varset_union(const VarSet& a, const VarSet& b);

/// Laurent monomial: variable -> nonzero integer exponent.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::map<VarName, long> exponents);
  static Monomial var(const VarName& v, long power = 1);

  const std::map<VarName, long>& exponents() const { return exps_; }
  long exponent(const VarName& v) const;
  bool is_constant() const { return exps_.empty(); }
  long total_degree() const;
  Monomial inverse() const;
  /// Monomial with the exponent of v removed.
  Monomial without(const VarName& v) const;
  /// "x*y^2*z^-1", or "1" for the constant monomial.
  std::string str() const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial& a, const Monomial& b) { return a.exps_ <=> b.exps_; }

 private:
  std::map<VarName, long> exps_;
};

/// Total-degree truncation: monomials of degree > cutoff are dropped.
/// std::nullopt means no degree truncation.
using DegreeCutoff = std::optional<long>;

DegreeCutoff min_degree(const DegreeCutoff& a, const DegreeCutoff& b);

/// Multivariate Laurent series with Novikov coefficients over a declared set
/// of variables. Every coefficient shares the series' energy cutoff; monomials
/// above the degree cutoff are dropped. Binary operations require identical
/// variable sets and take the smaller of each cutoff.
class MultiSeries {
 public:
  MultiSeries() = default;
  explicit MultiSeries(VarSet vars, ExtRational energy = ExtRational::infinity(),
                       DegreeCutoff degree = std::nullopt);
  MultiSeries(VarSet vars, std::map<Monomial, NovikovScalar> terms,
              ExtRational energy = ExtRational::infinity(), DegreeCutoff degree = std::nullopt);

  static MultiSeries constant(const VarSet& vars, NovikovScalar c);
  static MultiSeries variable(const VarSet& vars, const VarName& v);
  static MultiSeries term(const VarSet& vars, const Monomial& m, NovikovScalar c);

  const VarSet& vars() const { return vars_; }
  const std::map<Monomial, NovikovScalar>& terms() const { return terms_; }
  const ExtRational& energy_cutoff() const { return energy_; }
  const DegreeCutoff& degree_cutoff() const { return degree_; }
  /// Some term was dropped by the degree cutoff, so the series stands for an
  /// infinite one.
  bool degree_truncated() const { return truncated_; }
  bool is_zero() const { return terms_.empty(); }
  /// No variable occurs (possibly zero).
  bool is_constant() const;
  /// Exactly one term.
  bool is_monomial() const { return terms_.size() == 1; }
  /// Coefficient of the constant monomial.
  NovikovScalar constant_term() const;
  /// Variables that actually occur in some term.
  VarSet used_vars() const;

  /// Same terms over a different variable set that contains used_vars().
  MultiSeries with_vars(const VarSet& vars) const;
  MultiSeries truncate(const ExtRational& energy, const DegreeCutoff& degree) const;

  MultiSeries operator-() const;
  MultiSeries& operator+=(const MultiSeries& o);
  MultiSeries& operator-=(const MultiSeries& o);
  friend MultiSeries operator+(MultiSeries a, const MultiSeries& b) { return a += b; }
  friend MultiSeries operator-(MultiSeries a, const MultiSeries& b) { return a -= b; }
  friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);
  MultiSeries& operator*=(const MultiSeries& o) { return *this = *this * o; }
  MultiSeries scaled(const NovikovScalar& c) const;

  /// Multiplicative inverse. Succeeds for a single term (inverting its
  /// coefficient) or for L*(1 + N) where L is one of the terms and every term
  /// of N either has positive-valuation coefficient (finite energy cutoff)
  /// or positive total degree (finite degree cutoff). Otherwise throws
  /// NonInvertibleSubstitution.
  MultiSeries inverse() const;
  MultiSeries pow(long n) const;

  std::string str() const;
  friend MultiSeries partial_derivative(const MultiSeries& s, const VarName& v);
  /// Same variables, terms and cutoffs.
  friend bool operator==(const MultiSeries& a, const MultiSeries& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_ && a.energy_ == b.energy_ && a.degree_ == b.degree_;
  }

 private:
  void normalize();
  void require_same_vars(const MultiSeries& o) const;

  VarSet vars_;
  std::map<Monomial, NovikovScalar> terms_;
  ExtRational energy_ = ExtRational::infinity();
  DegreeCutoff degree_;
  bool truncated_ = false;
};

using Assignment = std::map<VarName, MultiSeries>;
using Point = std::map<VarName, NovikovScalar>;

/// Formal substitution v -> assignment[v] for every variable occurring in s.
/// The assigned series must all live over `target_vars`. Negative powers go
/// through MultiSeries::inverse().
MultiSeries substitute(const MultiSeries& s, const Assignment& assignment, const VarSet& target_vars);
/// Substitution where unassigned variables map to themselves; the variable
/// set of s is kept (assigned series must live over s.vars()).
MultiSeries substitute_partial(const MultiSeries& s, const Assignment& assignment);

MultiSeries partial_derivative(const MultiSeries& s, const VarName& v);

/// Evaluate at a point of Novikov scalars. Throws DivisionByZero when a
/// negative power meets zero. For a series that lost terms to its degree
/// cutoff the omitted tail only converges when every variable occurring with
/// a positive exponent has positive valuation; otherwise DivergentEvaluation.
/// The result of such an evaluation is cut at (D+1)*m + min(0, c), where D is
/// the degree cutoff, m the smallest valuation of those variables and c the
/// smallest coefficient valuation.
NovikovScalar evaluate(const MultiSeries& s, const Point& point);

}  // namespace novikit
