#pragma once

#include <set>
#include <string>
#include <vector>

#include "novikit/rational.hpp"

namespace novikit {

/// One term a*T^e of a Novikov series.
struct Term {
  Rational exponent;
  Gaussian coefficient;

  friend bool operator==(const Term&, const Term&) = default;
};

/// A finite truncation of an element of the Novikov field
///   sum_i a_i T^{A_i},  A_i strictly increasing,
/// carrying the energy cutoff below which the listed terms are reliable.
/// Terms are sorted, nonzero and strictly below the cutoff. The zero series
/// has no terms. A cutoff of +inf means the term list is the exact value.
///
/// Truncation rules: sums and products take the smaller cutoff of the
/// operands; invert() shifts the cutoff by -2*val (see invert()).
class NovikovScalar {
 public:
  NovikovScalar() = default;
  explicit NovikovScalar(std::vector<Term> terms, ExtRational cutoff = ExtRational::infinity());
  NovikovScalar(Gaussian constant);
  template <std::integral I>
  NovikovScalar(I n) : NovikovScalar(Gaussian(n)) {}

  static NovikovScalar monomial(Gaussian coefficient, Rational exponent,
                                ExtRational cutoff = ExtRational::infinity());
  /// T^e.
  static NovikovScalar t_power(Rational exponent) { return monomial(Gaussian(1), std::move(exponent)); }

  const std::vector<Term>& terms() const { return terms_; }
  const ExtRational& cutoff() const { return cutoff_; }
  bool is_zero() const { return terms_.empty(); }
  /// Exactly one term.
  bool is_monomial() const { return terms_.size() == 1; }
  /// Valuation: smallest exponent, +inf for zero.
  ExtRational val() const;
  /// Coefficient of the lowest term (zero for the zero series).
  Gaussian leading_coefficient() const;
  /// Coefficient of T^e (zero when absent).
  Gaussian coefficient(const Rational& e) const;

  NovikovScalar operator-() const;
  NovikovScalar& operator+=(const NovikovScalar& o);
  NovikovScalar& operator-=(const NovikovScalar& o);
  NovikovScalar& operator*=(const NovikovScalar& o);

  friend NovikovScalar operator+(NovikovScalar a, const NovikovScalar& b) { return a += b; }
  friend NovikovScalar operator-(NovikovScalar a, const NovikovScalar& b) { return a -= b; }
  friend NovikovScalar operator*(const NovikovScalar& a, const NovikovScalar& b);

  /// Multiplicative inverse. A single-term scalar inverts exactly at any
  /// cutoff. Otherwise the cutoff must be finite; for s = a*T^v*(1 + w) with
  /// cutoff c the result is reliable below c - 2v and carries that cutoff.
  NovikovScalar invert() const;
  /// Non-negative integer powers by repeated squaring; negative powers go
  /// through invert().
  NovikovScalar pow(long n) const;
  /// Drop every term with exponent >= e; cutoff becomes min(cutoff, e).
  NovikovScalar truncate(const ExtRational& e) const;
  /// Same terms, cutoff replaced (terms at or above it are dropped).
  NovikovScalar with_cutoff(const ExtRational& e) const;
  /// Multiply by T^shift (cutoff shifts along).
  NovikovScalar shifted(const Rational& shift) const;

  /// Human-readable form, e.g. "1 - T^2", "2*T^(1/2) + O(T^3)".
  std::string str() const;

  /// Exact structural equality (terms and cutoff).
  friend bool operator==(const NovikovScalar&, const NovikovScalar&) = default;

 private:
  void normalize();

  std::vector<Term> terms_;
  ExtRational cutoff_ = ExtRational::infinity();
};

/// True when a and b agree on every exponent below e.
bool equal_below(const NovikovScalar& a, const NovikovScalar& b, const ExtRational& e);

enum class RingClass { Lambda, Lambda0, LambdaPlus, Lambda0Units, LambdaUnits };

std::string_view to_string(RingClass c);

/// Membership in Lambda, Lambda_0 (val >= 0), Lambda_+ (val > 0),
/// Lambda_0^x (val = 0) and Lambda^x (nonzero).
std::set<RingClass> classify(const NovikovScalar& s);

}  // namespace novikit
