#pragma once

// Random inputs for the property tests. Every generator takes the engine by
// reference so a test is reproducible from its seed.

#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "novikit/multiseries.hpp"

namespace gen {

using novikit::ExtRational;
using novikit::Gaussian;
using novikit::MultiSeries;
using novikit::NovikovScalar;
using novikit::Rational;

inline long uniform(std::mt19937& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

inline bool coin(std::mt19937& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// p/q with |p| <= num_range and q in [1, max_den].
inline Rational rational(std::mt19937& rng, long num_range, long max_den) {
  return Rational(uniform(rng, -num_range, num_range), uniform(rng, 1, max_den));
}

inline Rational nonzero_rational(std::mt19937& rng, long num_range, long max_den) {
  long p = 0;
  while (p == 0) p = uniform(rng, -num_range, num_range);
  return Rational(p, uniform(rng, 1, max_den));
}

inline Gaussian gaussian(std::mt19937& rng, bool complex = true) {
  Rational re = rational(rng, 5, 3);
  Rational im = complex && coin(rng, 0.3) ? rational(rng, 5, 3) : Rational(0);
  return Gaussian(re, im);
}

inline Gaussian nonzero_gaussian(std::mt19937& rng, bool complex = true) {
  for (;;) {
    Gaussian g = gaussian(rng, complex);
    if (!g.is_zero()) return g;
  }
}

/// Exponent in [-2, 4] with denominator at most 4.
inline Rational exponent(std::mt19937& rng) { return Rational(uniform(rng, -8, 16), uniform(rng, 1, 4)); }

/// Up to `max_terms` random terms; the cutoff is +inf or a rational above
/// every exponent.
inline NovikovScalar scalar(std::mt19937& rng, int max_terms = 4, bool allow_zero = true, bool finite_cutoff = false) {
  std::vector<novikit::Term> terms;
  int n = static_cast<int>(uniform(rng, allow_zero ? 0 : 1, max_terms));
  Rational top(-100);
  for (int k = 0; k < n; ++k) {
    novikit::Term t{exponent(rng), nonzero_gaussian(rng)};
    if (t.exponent > top) top = t.exponent;
    terms.push_back(t);
  }
  ExtRational cutoff = ExtRational::infinity();
  if (finite_cutoff || coin(rng, 0.5)) {
    Rational base = n == 0 ? Rational(0) : top;
    cutoff = base + Rational(uniform(rng, 1, 12), uniform(rng, 1, 4));
  }
  NovikovScalar s(std::move(terms), cutoff);
  if (!allow_zero && s.is_zero()) return scalar(rng, max_terms, false, finite_cutoff);
  return s;
}

/// Polynomial in `vars` (non-negative exponents up to max_degree per
/// variable) with exact coefficients.
inline MultiSeries polynomial(std::mt19937& rng, const novikit::VarSet& vars, int max_terms = 4, long max_degree = 2,
                              bool laurent = false) {
  MultiSeries s(vars);
  int n = static_cast<int>(uniform(rng, 0, max_terms));
  for (int k = 0; k < n; ++k) {
    std::map<novikit::VarName, long> exps;
    for (const auto& v : vars) {
      long e = uniform(rng, laurent ? -max_degree : 0, max_degree);
      if (e != 0) exps[v] = e;
    }
    NovikovScalar c = NovikovScalar::monomial(nonzero_gaussian(rng, false), Rational(uniform(rng, 0, 6), uniform(rng, 1, 2)));
    s += MultiSeries::term(vars, novikit::Monomial(exps), c);
  }
  return s;
}

}  // namespace gen

namespace doctest {

template <>
struct StringMaker<novikit::NovikovScalar> {
  static String convert(const novikit::NovikovScalar& s) { return s.str().c_str(); }
};

template <>
struct StringMaker<novikit::MultiSeries> {
  static String convert(const novikit::MultiSeries& s) { return s.str().c_str(); }
};

template <>
struct StringMaker<novikit::ExtRational> {
  static String convert(const novikit::ExtRational& s) { return s.str().c_str(); }
};

}  // namespace doctest
