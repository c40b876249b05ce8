#include "novikit/multiseries.hpp"

#include <algorithm>

#include "novikit/error.hpp"

namespace novikit {

namespace {

constexpr int kMaxInverseSteps = 100000;

std::string join_vars(const VarSet& vs) {
  std::string out = "{";
  for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? "," : "") + vs[i];
  return out + "}";
}

}  // namespace

VarSet make_varset(std::vector<VarName> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

VarSet varset_union(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(std::map<VarName, long> exponents) : exps_(std::move(exponents)) {
  std::erase_if(exps_, [](const auto& kv) { return kv.second == 0; });
}

Monomial Monomial::var(const VarName& v, long power) { return Monomial({{v, power}}); }

long Monomial::exponent(const VarName& v) const {
  auto it = exps_.find(v);
  return it == exps_.end() ? 0 : it->second;
}

long Monomial::total_degree() const {
  long d = 0;
  for (const auto& [v, e] : exps_) d += e;
  return d;
}

Monomial Monomial::inverse() const {
  Monomial r = *this;
  for (auto& [v, e] : r.exps_) e = -e;
  return r;
}

Monomial Monomial::without(const VarName& v) const {
  Monomial r = *this;
  r.exps_.erase(v);
  return r;
}

std::string Monomial::str() const {
  if (exps_.empty()) return "1";
  std::string out;
  for (const auto& [v, e] : exps_) {
    if (!out.empty()) out += "*";
    out += v;
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (const auto& [v, e] : b.exps_) {
    long& slot = r.exps_[v];
    slot += e;
    if (slot == 0) r.exps_.erase(v);
  }
  return r;
}

DegreeCutoff min_degree(const DegreeCutoff& a, const DegreeCutoff& b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

// ---------------------------------------------------------------------------
// MultiSeries

MultiSeries::MultiSeries(VarSet vars, ExtRational energy, DegreeCutoff degree)
    : vars_(make_varset(std::move(vars))), energy_(std::move(energy)), degree_(degree) {}

MultiSeries::MultiSeries(VarSet vars, std::map<Monomial, NovikovScalar> terms, ExtRational energy,
                         DegreeCutoff degree)
    : vars_(make_varset(std::move(vars))), terms_(std::move(terms)), energy_(std::move(energy)),
      degree_(degree) {
  for (const auto& [m, c] : terms_) {
    for (const auto& [v, e] : m.exponents()) {
      if (!std::binary_search(vars_.begin(), vars_.end(), v))
        throw Error(ErrorKind::VariableMismatch,
                    "variable '" + v + "' is not among " + join_vars(vars_));
    }
  }
  normalize();
}

MultiSeries MultiSeries::constant(const VarSet& vars, NovikovScalar c) {
  std::map<Monomial, NovikovScalar> t;
  ExtRational cut = c.cutoff();
  t.emplace(Monomial(), std::move(c));
  return MultiSeries(vars, std::move(t), cut);
}

MultiSeries MultiSeries::variable(const VarSet& vars, const VarName& v) {
  return term(vars, Monomial::var(v), NovikovScalar(1));
}

MultiSeries MultiSeries::term(const VarSet& vars, const Monomial& m, NovikovScalar c) {
  std::map<Monomial, NovikovScalar> t;
  ExtRational cut = c.cutoff();
  t.emplace(m, std::move(c));
  return MultiSeries(vars, std::move(t), cut);
}

void MultiSeries::normalize() {
  for (const auto& [m, c] : terms_) energy_ = min(energy_, c.cutoff());
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (degree_ && it->first.total_degree() > *degree_) {
      truncated_ = true;
      it = terms_.erase(it);
      continue;
    }
    it->second = it->second.with_cutoff(energy_);
    if (it->second.is_zero()) it = terms_.erase(it);
    else ++it;
  }
}

bool MultiSeries::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_constant());
}

NovikovScalar MultiSeries::constant_term() const {
  auto it = terms_.find(Monomial());
  if (it == terms_.end()) return NovikovScalar().with_cutoff(energy_);
  return it->second;
}

VarSet MultiSeries::used_vars() const {
  std::vector<VarName> out;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m.exponents()) out.push_back(v);
  return make_varset(std::move(out));
}

MultiSeries MultiSeries::with_vars(const VarSet& vars) const {
  MultiSeries r(vars, terms_, energy_, degree_);
  r.truncated_ = truncated_;
  return r;
}

MultiSeries MultiSeries::truncate(const ExtRational& energy, const DegreeCutoff& degree) const {
  MultiSeries r(vars_, terms_, min(energy_, energy), min_degree(degree_, degree));
  r.truncated_ = r.truncated_ || truncated_;
  return r;
}

void MultiSeries::require_same_vars(const MultiSeries& o) const {
  if (vars_ != o.vars_)
    throw Error(ErrorKind::VariableMismatch,
                "series over " + join_vars(vars_) + " combined with series over " + join_vars(o.vars_));
}

MultiSeries MultiSeries::operator-() const {
  MultiSeries r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

MultiSeries& MultiSeries::operator+=(const MultiSeries& o) {
  require_same_vars(o);
  energy_ = min(energy_, o.energy_);
  degree_ = min_degree(degree_, o.degree_);
  truncated_ = truncated_ || o.truncated_;
  for (const auto& [m, c] : o.terms_) {
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) it->second += c;
  }
  normalize();
  return *this;
}

MultiSeries& MultiSeries::operator-=(const MultiSeries& o) { return *this += -o; }

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
  a.require_same_vars(b);
  const DegreeCutoff deg = min_degree(a.degree_, b.degree_);
  std::map<Monomial, NovikovScalar> acc;
  bool dropped = a.truncated_ || b.truncated_;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma * mb;
      if (deg && m.total_degree() > *deg) {
        dropped = true;
        continue;
      }
      NovikovScalar c = ca * cb;
      auto [it, inserted] = acc.try_emplace(std::move(m), c);
      if (!inserted) it->second += c;
    }
  }
  MultiSeries r(a.vars_, std::move(acc), min(a.energy_, b.energy_), deg);
  r.truncated_ = r.truncated_ || dropped;
  return r;
}

MultiSeries MultiSeries::scaled(const NovikovScalar& c) const {
  return *this * constant(vars_, c);
}

MultiSeries MultiSeries::inverse() const {
  if (terms_.empty())
    throw Error(ErrorKind::NonInvertibleSubstitution, "inverse of the zero series");
  auto invert_term = [&](const Monomial& m, const NovikovScalar& c) {
    try {
      return term(vars_, m.inverse(), c.invert()).truncate(energy_, degree_);
    } catch (const Error& e) {
      throw Error(ErrorKind::NonInvertibleSubstitution, "cannot invert coefficient: " + e.detail());
    }
  };
  if (terms_.size() == 1) return invert_term(terms_.begin()->first, terms_.begin()->second);

  for (const auto& [lead_m, lead_c] : terms_) {
    bool energy_ok = energy_.is_finite();
    bool degree_ok = degree_.has_value();
    for (const auto& [m, c] : terms_) {
      if (m == lead_m) continue;
      // coefficient of N is c / lead_c, monomial m / lead_m
      energy_ok = energy_ok && c.val() > lead_c.val();
      degree_ok = degree_ok && m.total_degree() > lead_m.total_degree();
    }
    if (!energy_ok && !degree_ok) continue;
    if (!lead_c.is_monomial() && lead_c.cutoff().is_infinite()) continue;

    const MultiSeries lead_inv = invert_term(lead_m, lead_c);
    const MultiSeries minus_n = -(((*this) - term(vars_, lead_m, lead_c)) * lead_inv);
    MultiSeries sum = constant(vars_, NovikovScalar(1)).truncate(minus_n.energy_, minus_n.degree_);
    MultiSeries power = sum;
    int step = 0;
    for (; step < kMaxInverseSteps; ++step) {
      power = power * minus_n;
      if (power.is_zero()) {
        sum.truncated_ = sum.truncated_ || power.truncated_;
        break;
      }
      sum += power;
    }
    if (step == kMaxInverseSteps)
      throw Error(ErrorKind::NonInvertibleSubstitution, "inverse series of " + str() + " did not terminate");
    return sum * lead_inv;
  }
  throw Error(ErrorKind::NonInvertibleSubstitution,
              "series " + str() + " is neither a single term nor a unit at the current cutoffs");
}

MultiSeries MultiSeries::pow(long n) const {
  if (n < 0) return inverse().pow(-n);
  MultiSeries result = constant(vars_, NovikovScalar(1)).truncate(energy_, degree_);
  MultiSeries base = *this;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

std::string MultiSeries::str() const {
  std::vector<std::pair<const Monomial*, const NovikovScalar*>> order;
  for (const auto& [m, c] : terms_) order.emplace_back(&m, &c);
  std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) {
    return x.first->total_degree() < y.first->total_degree();
  });
  std::string out;
  for (const auto& [m, c] : order) {
    const NovikovScalar coeff = c->with_cutoff(ExtRational::infinity());
    std::string piece;
    bool negative = false;
    if (m->is_constant()) {
      piece = coeff.is_monomial() ? coeff.str() : "(" + coeff.str() + ")";
    } else if (coeff == NovikovScalar(1)) {
      piece = m->str();
    } else if (coeff == NovikovScalar(-1)) {
      piece = "-" + m->str();
    } else if (coeff.is_monomial()) {
      piece = coeff.str() + "*" + m->str();
    } else {
      piece = "(" + coeff.str() + ")*" + m->str();
    }
    if (piece.front() == '-') {
      negative = true;
      piece.erase(0, 1);
    }
    if (out.empty()) out = negative ? "-" + piece : piece;
    else out += (negative ? " - " : " + ") + piece;
  }
  if (out.empty()) out = "0";
  if (energy_.is_finite()) out += " + O(" + NovikovScalar::t_power(energy_.value()).str() + ")";
  return out;
}

// ---------------------------------------------------------------------------
// Free operations

MultiSeries substitute(const MultiSeries& s, const Assignment& assignment, const VarSet& target_vars) {
  for (const auto& [v, image] : assignment) {
    if (image.vars() != make_varset(target_vars))
      throw Error(ErrorKind::VariableMismatch,
                  "image of '" + v + "' lives over " + join_vars(image.vars()) + ", expected " +
                      join_vars(make_varset(target_vars)));
  }
  std::map<std::pair<VarName, long>, MultiSeries> powers;
  auto power_of = [&](const VarName& v, long e) -> const MultiSeries& {
    auto key = std::make_pair(v, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    auto a = assignment.find(v);
    if (a == assignment.end())
      throw Error(ErrorKind::VariableMismatch, "variable '" + v + "' has no assigned image");
    MultiSeries p;
    if (e < 0) {
      try {
        p = a->second.pow(e);
      } catch (const Error& err) {
        throw Error(ErrorKind::NonInvertibleSubstitution,
                    "negative power of '" + v + "' -> " + a->second.str() + ": " + err.detail());
      }
    } else {
      p = a->second.pow(e);
    }
    return powers.emplace(key, std::move(p)).first->second;
  };

  MultiSeries result(target_vars, s.energy_cutoff());
  for (const auto& [m, c] : s.terms()) {
    MultiSeries t = MultiSeries::constant(result.vars(), c);
    for (const auto& [v, e] : m.exponents()) t = t * power_of(v, e);
    result += t;
  }
  return result;
}

MultiSeries substitute_partial(const MultiSeries& s, const Assignment& assignment) {
  Assignment full;
  for (const auto& v : s.used_vars()) {
    auto it = assignment.find(v);
    full.emplace(v, it != assignment.end() ? it->second : MultiSeries::variable(s.vars(), v));
  }
  return substitute(s, full, s.vars());
}

MultiSeries partial_derivative(const MultiSeries& s, const VarName& v) {
  std::map<Monomial, NovikovScalar> out;
  for (const auto& [m, c] : s.terms()) {
    long e = m.exponent(v);
    if (e == 0) continue;
    out.emplace(m * Monomial::var(v, -1), c * NovikovScalar(e));
  }
  DegreeCutoff deg = s.degree_cutoff();
  if (deg) *deg -= 1;
  MultiSeries r(s.vars(), std::move(out), s.energy_cutoff(), deg);
  r.truncated_ = r.truncated_ || s.truncated_;
  return r;
}

NovikovScalar evaluate(const MultiSeries& s, const Point& point) {
  for (const auto& v : s.used_vars())
    if (!point.count(v)) throw Error(ErrorKind::VariableMismatch, "no value for variable '" + v + "'");
  if (s.degree_truncated()) {
    for (const auto& [m, c] : s.terms()) {
      for (const auto& [v, e] : m.exponents()) {
        const ExtRational val = point.at(v).val();
        if (e > 0 && val <= ExtRational(0))
          throw Error(ErrorKind::DivergentEvaluation,
                      "the series was cut at degree " + std::to_string(*s.degree_cutoff()) + " and " + v +
                          " has valuation " + val.str() + " <= 0, so the omitted tail does not converge");
      }
    }
  }
  ExtRational cutoff = s.energy_cutoff();
  if (s.degree_truncated()) {
    // Omitted monomials have degree above the cutoff, so they are bounded by
    // (D+1) times the smallest valuation of a positively occurring variable.
    ExtRational smallest = ExtRational::infinity();
    Rational coeff_floor(0);
    for (const auto& [m, c] : s.terms()) {
      if (!c.is_zero()) coeff_floor = std::min(coeff_floor, c.val().value());
      for (const auto& [v, e] : m.exponents())
        if (e > 0) smallest = min(smallest, point.at(v).val());
    }
    if (smallest.is_finite())
      cutoff = min(cutoff, ExtRational(Rational(*s.degree_cutoff() + 1) * smallest.value() + coeff_floor));
  }
  NovikovScalar result = NovikovScalar().with_cutoff(cutoff);
  std::map<std::pair<VarName, long>, NovikovScalar> powers;
  for (const auto& [m, c] : s.terms()) {
    bool vanishes = false;
    for (const auto& [v, e] : m.exponents()) {
      if (!point.at(v).is_zero()) continue;
      if (e < 0)
        throw Error(ErrorKind::DivisionByZero, "negative power " + v + "^" + std::to_string(e) + " at " + v + " = 0");
      vanishes = true;
    }
    if (vanishes) continue;
    NovikovScalar value = c;
    for (const auto& [v, e] : m.exponents()) {
      auto key = std::make_pair(v, e);
      auto pit = powers.find(key);
      if (pit == powers.end()) pit = powers.emplace(key, point.at(v).pow(e)).first;
      value = value * pit->second;
    }
    result += value;
  }
  return result;
}

}  // namespace novikit
