#include "novikit/rational.hpp"

#include <cctype>
#include <climits>

#include "novikit/error.hpp"

namespace novikit {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroNotInvertible: return "ZeroNotInvertible";
    case ErrorKind::InfiniteCutoff: return "InfiniteCutoff";
    case ErrorKind::VariableMismatch: return "VariableMismatch";
    case ErrorKind::NonInvertibleSubstitution: return "NonInvertibleSubstitution";
    case ErrorKind::DivergentEvaluation: return "DivergentEvaluation";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::ChartMismatch: return "ChartMismatch";
    case ErrorKind::OutsideOverlap: return "OutsideOverlap";
    case ErrorKind::NotSolvable: return "NotSolvable";
    case ErrorKind::NoRoots: return "NoRoots";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::UnsupportedPotential: return "UnsupportedPotential";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::UnknownChart: return "UnknownChart";
    case ErrorKind::UnknownTransition: return "UnknownTransition";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Rational::Rational(long num, long den) {
  if (den == 0) throw Error(ErrorKind::DivisionByZero, "rational with zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

Rational::Rational(mpq_class q) : q_(std::move(q)) {
  if (q_.get_den() == 0) throw Error(ErrorKind::DivisionByZero, "rational with zero denominator");
  q_.canonicalize();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

mpz_class parse_integer(std::string_view s, std::string_view whole) {
  s = trim(s);
  std::string digits(s);
  bool ok = !digits.empty();
  for (std::size_t i = 0; i < digits.size() && ok; ++i) {
    char c = digits[i];
    if (i == 0 && (c == '-' || c == '+')) {
      ok = digits.size() > 1;
      continue;
    }
    ok = std::isdigit(static_cast<unsigned char>(c)) != 0;
  }
  if (!ok) throw Error(ErrorKind::ParseError, "malformed rational '" + std::string(whole) + "'");
  if (digits.front() == '+') digits.erase(0, 1);
  return mpz_class(digits, 10);
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  std::string_view s = trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(mpq_class(parse_integer(s, text)));
  mpz_class num = parse_integer(s.substr(0, slash), text);
  mpz_class den = parse_integer(s.substr(slash + 1), text);
  if (den == 0) throw Error(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
  return Rational(mpq_class(num, den));
}

std::string Rational::str() const {
  if (is_integer()) return q_.get_num().get_str();
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

long Rational::to_long() const {
  if (!is_integer() || !q_.get_num().fits_slong_p())
    throw Error(ErrorKind::InvalidArgument, "expected a machine integer, got " + str());
  return q_.get_num().get_si();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw Error(ErrorKind::DivisionByZero, "rational division by zero");
  q_ /= o.q_;
  return *this;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

Rational floor(const Rational& r) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), r.num().get_mpz_t(), r.den().get_mpz_t());
  return Rational(mpq_class(f));
}

ExtRational ExtRational::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s == "inf" || s == "+inf" || s == "infinity") return infinity();
  return ExtRational(Rational::parse(s));
}

const Rational& ExtRational::value() const {
  if (!v_) throw Error(ErrorKind::InvalidArgument, "value() of +inf");
  return *v_;
}

Gaussian Gaussian::inverse() const {
  if (is_zero()) throw Error(ErrorKind::ZeroNotInvertible, "inverse of zero coefficient");
  Rational n = norm();
  return Gaussian(re_ / n, -im_ / n);
}

Gaussian& Gaussian::operator*=(const Gaussian& o) {
  Rational re = re_ * o.re_ - im_ * o.im_;
  Rational im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

std::string Gaussian::str() const {
  if (im_.is_zero()) return re_.str();
  std::string imag;
  if (im_ == Rational(1)) imag = "i";
  else if (im_ == Rational(-1)) imag = "-i";
  else imag = im_.str() + "i";
  if (re_.is_zero()) return imag;
  if (imag.front() == '-') return re_.str() + imag;
  return re_.str() + "+" + imag;
}

}  // namespace novikit
