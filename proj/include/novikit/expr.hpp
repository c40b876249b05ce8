#pragma once

#include <map>
#include <string>
#include <string_view>

#include "novikit/multiseries.hpp"

namespace novikit {

/// Named rational parameters (areas such as A_S, Delta, B1) substituted into
/// text expressions.
using Parameters = std::map<std::string, Rational>;

// Text syntax shared by model files, the CLI and the tests.
//
//   sums, differences, products (explicit '*' or juxtaposition), quotients,
//   parentheses, integer literals;
//   T^e for the Novikov parameter, where e is a rational expression in the
//   parameters: T^2, T^-1, T^(1/2), T^{A1+A2-A7}, T^Delta;
//   v^n for a declared variable with integer n (parameter expressions allowed
//   when they evaluate to an integer): t^-1, y0^2, t^{a};
//   i for the imaginary unit;
//   O(T^e) adds the energy cutoff e to the expression.
//
// Identifiers naming a declared variable are variables; any other identifier
// must be a parameter. T, i and O are reserved.

/// Rational-valued expression over parameters, e.g. "A1+A2-A7" or "3/2".
Rational parse_rational_expr(std::string_view text, const Parameters& params = {});

/// A Novikov scalar, e.g. "2 + T^(1/2) + O(T^3)".
NovikovScalar parse_scalar(std::string_view text, const Parameters& params = {});

/// A series over `vars`, e.g. "u*v - 1" or "T^{Delta}(1 - u y)".
MultiSeries parse_series(std::string_view text, const VarSet& vars, const Parameters& params = {});

/// Point literal "u=T^(1/2), v=T^(1/2)" (',' or ';' separated).
Point parse_point(std::string_view text, const Parameters& params = {});

}  // namespace novikit
