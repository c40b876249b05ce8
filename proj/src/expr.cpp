#include "novikit/expr.hpp"

#include <algorithm>
#include <cctype>

#include "novikit/error.hpp"

namespace novikit {

namespace {

// Recursive-descent parser. Every value is a MultiSeries over the declared
// variables; scalars are constant series and O(T^e) is the zero series with
// energy cutoff e, so ordinary addition applies the truncation.
class Parser {
 public:
  Parser(std::string_view text, const VarSet& vars, const Parameters& params)
      : text_(text), vars_(make_varset(vars)), params_(params) {}

  MultiSeries parse_all() {
    MultiSeries v = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::ParseError,
                "in \"" + std::string(text_) + "\" at column " + std::to_string(pos_ + 1) + ": " + message);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  bool starts_atom() {
    char c = peek();
    return c == '(' || std::isdigit(static_cast<unsigned char>(c)) || ident_start(c);
  }

  std::string identifier() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  MultiSeries constant(NovikovScalar c) const { return MultiSeries::constant(vars_, std::move(c)); }

  MultiSeries expression() {
    MultiSeries acc = term();
    for (;;) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  MultiSeries term() {
    MultiSeries acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        MultiSeries d = unary();
        if (d.is_zero()) fail("division by zero");
        try {
          acc = acc * d.inverse();
        } catch (const Error& e) {
          fail("cannot divide by " + d.str() + " (" + e.detail() + ")");
        }
      } else if (starts_atom()) {
        acc = acc * power();
      } else {
        return acc;
      }
    }
  }

  MultiSeries unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  // Exponent after '^': optional sign, then an integer, a parameter, or a
  // bracketed rational expression.
  Rational exponent() {
    if (accept('-')) return -exponent();
    char c = peek();
    if (c == '(' || c == '{') {
      ++pos_;
      MultiSeries e = expression();
      expect(c == '(' ? ')' : '}');
      return as_rational(e, "exponent");
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return integer();
    if (ident_start(c)) {
      std::string name = identifier();
      auto it = params_.find(name);
      if (it == params_.end()) fail("unknown parameter '" + name + "' in exponent");
      return it->second;
    }
    fail("expected an exponent");
  }

  Rational as_rational(const MultiSeries& e, const std::string& what) {
    if (!e.is_constant()) fail(what + " must not contain variables");
    NovikovScalar s = e.constant_term();
    if (s.is_zero()) return Rational(0);
    if (!s.is_monomial() || !s.terms().front().exponent.is_zero() || !s.leading_coefficient().is_real())
      fail(what + " must be a real rational, got " + s.str());
    return s.leading_coefficient().re();
  }

  Rational integer() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return Rational::parse(text_.substr(start, pos_ - start));
  }

  MultiSeries power() {
    skip_space();
    const std::size_t start = pos_;
    char c = peek();
    if (ident_start(c)) {
      std::string name = identifier();
      if (name == "T") {
        Rational e(1);
        if (accept('^')) e = exponent();
        return constant(NovikovScalar::t_power(e));
      }
      if (name == "O") {
        expect('(');
        MultiSeries inner = expression();
        expect(')');
        if (!inner.is_monomial() || !inner.is_constant() || !inner.constant_term().is_monomial() ||
            !inner.constant_term().leading_coefficient().is_one())
          fail("O(...) expects a single power T^e");
        return MultiSeries(vars_, inner.constant_term().val());
      }
      MultiSeries base;
      if (name == "i") {
        base = constant(Gaussian::i());
      } else if (std::binary_search(vars_.begin(), vars_.end(), name)) {
        base = MultiSeries::variable(vars_, name);
      } else {
        auto it = params_.find(name);
        if (it == params_.end()) {
          pos_ = start;
          fail("unknown identifier '" + name + "'");
        }
        base = constant(Gaussian(it->second));
      }
      return raise(base);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return raise(constant(Gaussian(integer())));
    if (accept('(')) {
      MultiSeries inner = expression();
      expect(')');
      return raise(inner);
    }
    if (c == '\0') fail("unexpected end of input");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  MultiSeries raise(const MultiSeries& base) {
    if (!accept('^')) return base;
    Rational e = exponent();
    if (!e.is_integer()) fail("only T may carry a fractional exponent, got ^" + e.str());
    try {
      return base.pow(e.to_long());
    } catch (const Error& err) {
      fail("cannot raise " + base.str() + " to " + e.str() + " (" + err.detail() + ")");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  VarSet vars_;
  const Parameters& params_;
};

// Splits "a=1, b=(x, y)" on top-level separators.
std::vector<std::string_view> split_top_level(std::string_view text) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    char c = i < text.size() ? text[i] : ',';
    if (c == '(' || c == '{') ++depth;
    else if (c == ')' || c == '}') --depth;
    else if ((c == ',' || c == ';') && depth == 0) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational_expr(std::string_view text, const Parameters& params) {
  NovikovScalar s = parse_scalar(text, params);
  if (s.is_zero()) return Rational(0);
  if (!s.is_monomial() || !s.terms().front().exponent.is_zero() || !s.leading_coefficient().is_real())
    throw Error(ErrorKind::ParseError, "\"" + std::string(text) + "\" is not a rational number");
  return s.leading_coefficient().re();
}

NovikovScalar parse_scalar(std::string_view text, const Parameters& params) {
  MultiSeries s = Parser(text, {}, params).parse_all();
  return s.constant_term();
}

MultiSeries parse_series(std::string_view text, const VarSet& vars, const Parameters& params) {
  return Parser(text, vars, params).parse_all();
}

Point parse_point(std::string_view text, const Parameters& params) {
  Point out;
  for (std::string_view item : split_top_level(text)) {
    item = trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::ParseError, "point entry \"" + std::string(item) + "\" lacks '='");
    std::string name(trim(item.substr(0, eq)));
    if (name.empty())
      throw Error(ErrorKind::ParseError, "point entry \"" + std::string(item) + "\" lacks a variable name");
    if (out.count(name)) throw Error(ErrorKind::ParseError, "variable '" + name + "' given twice");
    out.emplace(name, parse_scalar(item.substr(eq + 1), params));
  }
  return out;
}

}  // namespace novikit
