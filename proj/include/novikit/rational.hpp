#pragma once

#include <compare>
#include <concepts>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace novikit {

/// Exact rational number in canonical form (denominator > 0, reduced).
class Rational {
 public:
  Rational() = default;
  template <std::integral I>
  Rational(I n) : q_(static_cast<long>(n)) {}
  Rational(long num, long den);
  explicit Rational(mpq_class q);

  /// Accepts "p", "-p", "p/q" (whitespace around the slash allowed).
  static Rational parse(std::string_view text);

  std::string str() const;
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  int sign() const { return sgn(q_); }
  /// Throws InvalidArgument unless the value is an integer that fits a long.
  long to_long() const;
  double to_double() const { return q_.get_d(); }
  const mpz_class& num() const { return q_.get_num(); }
  const mpz_class& den() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class q_{0};
};

Rational abs(const Rational& r);
Rational floor(const Rational& r);

/// Q extended by +infinity. Used for valuations (val(0) = +inf) and for
/// truncation cutoffs (no truncation = +inf).
class ExtRational {
 public:
  ExtRational() = default;  // +inf
  ExtRational(Rational r) : v_(std::move(r)) {}
  template <std::integral I>
  ExtRational(I n) : v_(Rational(n)) {}

  static ExtRational infinity() { return ExtRational(); }
  /// Accepts "inf", "+inf" or anything Rational::parse accepts.
  static ExtRational parse(std::string_view text);

  bool is_infinite() const { return !v_.has_value(); }
  bool is_finite() const { return v_.has_value(); }
  const Rational& value() const;
  std::string str() const { return v_ ? v_->str() : "inf"; }

  friend bool operator==(const ExtRational& a, const ExtRational& b) = default;
  friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
    if (!a.v_ || !b.v_) {
      if (!a.v_ && !b.v_) return std::strong_ordering::equal;
      return !a.v_ ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return *a.v_ <=> *b.v_;
  }
  friend ExtRational operator+(const ExtRational& a, const ExtRational& b) {
    if (!a.v_ || !b.v_) return ExtRational();
    return ExtRational(*a.v_ + *b.v_);
  }
  friend ExtRational operator-(const ExtRational& a, const Rational& b) {
    if (!a.v_) return ExtRational();
    return ExtRational(*a.v_ - b);
  }
  friend std::ostream& operator<<(std::ostream& os, const ExtRational& r) { return os << r.str(); }

 private:
  std::optional<Rational> v_;
};

inline ExtRational min(const ExtRational& a, const ExtRational& b) { return a <= b ? a : b; }
inline ExtRational max(const ExtRational& a, const ExtRational& b) { return a >= b ? a : b; }

/// Gaussian rational re + im*i; the exact stand-in for complex coefficients.
class Gaussian {
 public:
  Gaussian() = default;
  Gaussian(Rational re) : re_(std::move(re)) {}
  template <std::integral I>
  Gaussian(I n) : re_(n) {}
  Gaussian(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

  static Gaussian i() { return Gaussian(Rational(0), Rational(1)); }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_real() const { return im_.is_zero(); }
  bool is_one() const { return im_.is_zero() && re_ == Rational(1); }
  Gaussian conj() const { return Gaussian(re_, -im_); }
  Rational norm() const { return re_ * re_ + im_ * im_; }
  Gaussian inverse() const;
  /// "3", "-1/2", "i", "-2i", "1+2i" (no surrounding parentheses).
  std::string str() const;

  Gaussian operator-() const { return Gaussian(-re_, -im_); }
  Gaussian& operator+=(const Gaussian& o) { re_ += o.re_; im_ += o.im_; return *this; }
  Gaussian& operator-=(const Gaussian& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  Gaussian& operator*=(const Gaussian& o);
  Gaussian& operator/=(const Gaussian& o) { return *this *= o.inverse(); }

  friend Gaussian operator+(Gaussian a, const Gaussian& b) { return a += b; }
  friend Gaussian operator-(Gaussian a, const Gaussian& b) { return a -= b; }
  friend Gaussian operator*(Gaussian a, const Gaussian& b) { return a *= b; }
  friend Gaussian operator/(Gaussian a, const Gaussian& b) { return a /= b; }
  friend bool operator==(const Gaussian& a, const Gaussian& b) = default;

  friend std::ostream& operator<<(std::ostream& os, const Gaussian& g) { return os << g.str(); }

 private:
  Rational re_;
  Rational im_;
};

}  // namespace novikit
