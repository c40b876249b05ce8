#include "novikit/novikov.hpp"

#include <algorithm>
#include <map>

#include "novikit/error.hpp"

namespace novikit {

namespace {

// Guards the geometric-series loop in invert(); every realistic input
// terminates far earlier because the correction's valuation grows each step.
constexpr int kMaxInverseSteps = 100000;

std::vector<Term> from_map(std::map<Rational, Gaussian>&& acc, const ExtRational& cutoff) {
  std::vector<Term> out;
  out.reserve(acc.size());
  for (auto& [e, c] : acc) {
    if (c.is_zero() || ExtRational(e) >= cutoff) continue;
    out.push_back(Term{e, std::move(c)});
  }
  return out;
}

}  // namespace

NovikovScalar::NovikovScalar(std::vector<Term> terms, ExtRational cutoff)
    : terms_(std::move(terms)), cutoff_(std::move(cutoff)) {
  normalize();
}

NovikovScalar::NovikovScalar(Gaussian constant) {
  if (!constant.is_zero()) terms_.push_back(Term{Rational(0), std::move(constant)});
}

NovikovScalar NovikovScalar::monomial(Gaussian coefficient, Rational exponent, ExtRational cutoff) {
  return NovikovScalar({Term{std::move(exponent), std::move(coefficient)}}, std::move(cutoff));
}

void NovikovScalar::normalize() {
  bool sorted = true;
  for (std::size_t i = 1; i < terms_.size() && sorted; ++i)
    sorted = terms_[i - 1].exponent < terms_[i].exponent;
  if (!sorted) {
    std::map<Rational, Gaussian> acc;
    for (auto& t : terms_) acc[t.exponent] += t.coefficient;
    terms_ = from_map(std::move(acc), cutoff_);
    return;
  }
  std::erase_if(terms_, [&](const Term& t) {
    return t.coefficient.is_zero() || ExtRational(t.exponent) >= cutoff_;
  });
}

ExtRational NovikovScalar::val() const {
  if (terms_.empty()) return ExtRational::infinity();
  return terms_.front().exponent;
}

Gaussian NovikovScalar::leading_coefficient() const {
  return terms_.empty() ? Gaussian() : terms_.front().coefficient;
}

Gaussian NovikovScalar::coefficient(const Rational& e) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), e,
                             [](const Term& t, const Rational& x) { return t.exponent < x; });
  if (it != terms_.end() && it->exponent == e) return it->coefficient;
  return Gaussian();
}

NovikovScalar NovikovScalar::operator-() const {
  NovikovScalar r = *this;
  for (auto& t : r.terms_) t.coefficient = -t.coefficient;
  return r;
}

NovikovScalar& NovikovScalar::operator+=(const NovikovScalar& o) {
  ExtRational cut = min(cutoff_, o.cutoff_);
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->exponent < b->exponent)) {
      merged.push_back(std::move(*a++));
    } else if (a == terms_.end() || b->exponent < a->exponent) {
      merged.push_back(*b++);
    } else {
      Gaussian c = a->coefficient + b->coefficient;
      if (!c.is_zero()) merged.push_back(Term{a->exponent, std::move(c)});
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  cutoff_ = std::move(cut);
  std::erase_if(terms_, [&](const Term& t) { return ExtRational(t.exponent) >= cutoff_; });
  return *this;
}

NovikovScalar& NovikovScalar::operator-=(const NovikovScalar& o) { return *this += -o; }

NovikovScalar operator*(const NovikovScalar& a, const NovikovScalar& b) {
  ExtRational cut = min(a.cutoff_, b.cutoff_);
  std::map<Rational, Gaussian> acc;
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) {
      Rational e = x.exponent + y.exponent;
      if (ExtRational(e) >= cut) break;  // y exponents increase
      acc[e] += x.coefficient * y.coefficient;
    }
  }
  NovikovScalar r;
  r.cutoff_ = cut;
  r.terms_ = from_map(std::move(acc), cut);
  return r;
}

NovikovScalar& NovikovScalar::operator*=(const NovikovScalar& o) { return *this = *this * o; }

NovikovScalar NovikovScalar::invert() const {
  if (is_zero()) throw Error(ErrorKind::ZeroNotInvertible, "inverse of the zero series");
  const Rational v = terms_.front().exponent;
  const Gaussian lead_inv = terms_.front().coefficient.inverse();
  if (is_monomial()) {
    return NovikovScalar({Term{-v, lead_inv}}, cutoff_.is_infinite() ? cutoff_ : cutoff_ - v * 2);
  }
  if (cutoff_.is_infinite())
    throw Error(ErrorKind::InfiniteCutoff, "inverting the multi-term series " + str() +
                                               " needs a finite truncation energy");
  // s = a T^v (1 + w); w has positive valuation and is known below c - v.
  const ExtRational unit_cut = cutoff_ - v;
  std::vector<Term> w_terms;
  for (std::size_t i = 1; i < terms_.size(); ++i)
    w_terms.push_back(Term{terms_[i].exponent - v, terms_[i].coefficient * lead_inv});
  const NovikovScalar minus_w = -NovikovScalar(std::move(w_terms), unit_cut);

  NovikovScalar sum = NovikovScalar(Gaussian(1)).with_cutoff(unit_cut);
  NovikovScalar power = sum;
  for (int step = 0; step < kMaxInverseSteps; ++step) {
    power = power * minus_w;
    if (power.is_zero()) break;
    sum += power;
  }
  return sum.shifted(-v) * NovikovScalar(lead_inv);
}

NovikovScalar NovikovScalar::pow(long n) const {
  if (n < 0) return invert().pow(-n);
  NovikovScalar result = NovikovScalar(Gaussian(1)).with_cutoff(cutoff_);
  NovikovScalar base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

NovikovScalar NovikovScalar::truncate(const ExtRational& e) const {
  return with_cutoff(min(cutoff_, e));
}

NovikovScalar NovikovScalar::with_cutoff(const ExtRational& e) const {
  NovikovScalar r = *this;
  r.cutoff_ = e;
  std::erase_if(r.terms_, [&](const Term& t) { return ExtRational(t.exponent) >= e; });
  return r;
}

NovikovScalar NovikovScalar::shifted(const Rational& shift) const {
  NovikovScalar r = *this;
  for (auto& t : r.terms_) t.exponent += shift;
  if (r.cutoff_.is_finite()) r.cutoff_ = ExtRational(r.cutoff_.value() + shift);
  return r;
}

namespace {

std::string exponent_str(const Rational& e) {
  if (e == Rational(1)) return "T";
  if (e.is_integer() && e.sign() > 0) return "T^" + e.str();
  return "T^(" + e.str() + ")";
}

}  // namespace

std::string NovikovScalar::str() const {
  std::string out;
  auto append = [&out](std::string piece, bool negative) {
    if (out.empty()) {
      out = negative ? "-" + piece : piece;
    } else {
      out += negative ? " - " : " + ";
      out += piece;
    }
  };
  for (const auto& t : terms_) {
    const Gaussian& c = t.coefficient;
    const bool is_const = t.exponent.is_zero();
    bool negative = false;
    std::string coeff;
    if (c.is_real()) {
      negative = c.re().sign() < 0;
      Rational mag = abs(c.re());
      if (!(mag == Rational(1)) || is_const) coeff = mag.str();
    } else if (c.re().is_zero()) {
      negative = c.im().sign() < 0;
      Rational mag = abs(c.im());
      coeff = mag == Rational(1) ? "i" : mag.str() + "i";
    } else {
      coeff = "(" + c.str() + ")";
    }
    std::string piece = coeff;
    if (!is_const) piece = coeff.empty() ? exponent_str(t.exponent) : coeff + "*" + exponent_str(t.exponent);
    append(std::move(piece), negative);
  }
  if (out.empty()) out = "0";
  if (cutoff_.is_finite()) out += " + O(" + exponent_str(cutoff_.value()) + ")";
  return out;
}

bool equal_below(const NovikovScalar& a, const NovikovScalar& b, const ExtRational& e) {
  return a.truncate(e).terms() == b.truncate(e).terms();
}

std::string_view to_string(RingClass c) {
  switch (c) {
    case RingClass::Lambda: return "Lambda";
    case RingClass::Lambda0: return "Lambda0";
    case RingClass::LambdaPlus: return "LambdaPlus";
    case RingClass::Lambda0Units: return "Lambda0Units";
    case RingClass::LambdaUnits: return "LambdaUnits";
  }
  return "?";
}

std::set<RingClass> classify(const NovikovScalar& s) {
  std::set<RingClass> out{RingClass::Lambda};
  const ExtRational v = s.val();
  if (v >= ExtRational(0)) out.insert(RingClass::Lambda0);
  if (v > ExtRational(0)) out.insert(RingClass::LambdaPlus);
  if (v == ExtRational(0)) out.insert(RingClass::Lambda0Units);
  if (!s.is_zero()) out.insert(RingClass::LambdaUnits);
  return out;
}

}  // namespace novikit
