#include "novikit/valuation.hpp"

#include <algorithm>
#include <set>

#include "novikit/error.hpp"

namespace novikit {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::Eq: return "=";
    case Relation::Gt: return ">";
    case Relation::Ge: return ">=";
    case Relation::Lt: return "<";
    case Relation::Le: return "<=";
  }
  return "?";
}

Relation parse_relation(std::string_view text) {
  if (text == "=" || text == "==") return Relation::Eq;
  if (text == ">") return Relation::Gt;
  if (text == ">=") return Relation::Ge;
  if (text == "<") return Relation::Lt;
  if (text == "<=") return Relation::Le;
  throw Error(ErrorKind::ParseError, "unknown relation '" + std::string(text) + "'");
}

ValuationConstraint ValuationConstraint::on(const VarName& v, Relation rel, ExtRational bound) {
  ValuationConstraint c;
  c.form[v] = Rational(1);
  c.rel = rel;
  c.bound = std::move(bound);
  return c;
}

VarSet ValuationConstraint::vars() const {
  std::vector<VarName> out;
  for (const auto& [v, n] : form)
    if (!n.is_zero()) out.push_back(v);
  return make_varset(std::move(out));
}

bool ValuationConstraint::holds(const std::map<VarName, ExtRational>& vals) const {
  Rational finite = constant;
  bool pos_inf = false;
  bool neg_inf = false;
  for (const auto& [v, n] : form) {
    if (n.is_zero()) continue;
    auto it = vals.find(v);
    if (it == vals.end())
      throw Error(ErrorKind::VariableMismatch, "no valuation given for '" + v + "' in " + str());
    if (it->second.is_infinite()) (n.sign() > 0 ? pos_inf : neg_inf) = true;
    else finite += n * it->second.value();
  }
  if (pos_inf && neg_inf) return false;
  if (bound.is_infinite()) return !pos_inf;
  if (pos_inf) return rel == Relation::Gt || rel == Relation::Ge;
  if (neg_inf) return rel == Relation::Lt || rel == Relation::Le;
  const Rational& b = bound.value();
  switch (rel) {
    case Relation::Eq: return finite == b;
    case Relation::Gt: return finite > b;
    case Relation::Ge: return finite >= b;
    case Relation::Lt: return finite < b;
    case Relation::Le: return finite <= b;
  }
  return false;
}

std::string ValuationConstraint::str() const {
  std::string out;
  for (const auto& [v, n] : form) {
    if (n.is_zero()) continue;
    const bool negative = n.sign() < 0;
    const Rational mag = abs(n);
    std::string piece = (mag == Rational(1) ? "" : mag.str() + "*") + "val(" + v + ")";
    if (out.empty()) out = negative ? "-" + piece : piece;
    else out += (negative ? " - " : " + ") + piece;
  }
  if (out.empty()) out = constant.str();
  else if (!constant.is_zero())
    out += (constant.sign() < 0 ? " - " : " + ") + abs(constant).str();
  return out + " " + std::string(to_string(rel)) + " " + bound.str();
}

bool Domain::holds(const std::map<VarName, ExtRational>& vals) const {
  return std::any_of(clauses.begin(), clauses.end(), [&](const Conjunction& c) {
    return std::all_of(c.begin(), c.end(), [&](const ValuationConstraint& k) { return k.holds(vals); });
  });
}

std::optional<ValuationConstraint> Domain::first_violation(const std::map<VarName, ExtRational>& vals) const {
  std::optional<ValuationConstraint> best;
  std::size_t best_failures = 0;
  for (const auto& clause : clauses) {
    std::size_t failures = 0;
    const ValuationConstraint* first = nullptr;
    for (const auto& k : clause) {
      if (!k.holds(vals)) {
        if (!first) first = &k;
        ++failures;
      }
    }
    if (failures == 0) return std::nullopt;
    if (!best || failures < best_failures) {
      best = *first;
      best_failures = failures;
    }
  }
  return best;
}

VarSet Domain::vars() const {
  VarSet out;
  for (const auto& clause : clauses)
    for (const auto& k : clause) out = varset_union(out, k.vars());
  return out;
}

std::string Domain::str() const {
  if (clauses.empty()) return "empty";
  if (is_everything()) return "everything";
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    std::string c;
    for (const auto& k : clauses[i]) c += (c.empty() ? "" : " and ") + k.str();
    if (c.empty()) c = "everything";
    if (clauses.size() > 1) c = "(" + c + ")";
    out += (i ? " or " : "") + c;
  }
  return out;
}

Domain intersect(const Domain& a, const Domain& b) {
  Domain out;
  out.clauses.clear();
  for (const auto& ca : a.clauses) {
    for (const auto& cb : b.clauses) {
      Conjunction c = ca;
      for (const auto& k : cb)
        if (std::find(c.begin(), c.end(), k) == c.end()) c.push_back(k);
      out.clauses.push_back(std::move(c));
    }
  }
  return out;
}

std::map<VarName, ExtRational> valuations(const Point& p) {
  std::map<VarName, ExtRational> out;
  for (const auto& [v, s] : p) out.emplace(v, s.val());
  return out;
}

// ---------------------------------------------------------------------------
// Fourier-Motzkin feasibility

namespace {

// a.x + b >= 0, or > 0 when strict; prov lists the input constraints it was
// derived from.
struct Ineq {
  std::vector<Rational> a;
  Rational b;
  bool strict = false;
  std::vector<std::size_t> prov;
};

// Combinations past this count mean the input is far outside the intended
// size (a handful of variables per overlap).
constexpr std::size_t kMaxInequalities = 200000;

struct CoreResult {
  bool feasible = false;
  std::vector<Rational> x;
  std::vector<std::size_t> conflict;
};

std::vector<std::size_t> merge_prov(const std::vector<std::size_t>& p, const std::vector<std::size_t>& q) {
  std::vector<std::size_t> out;
  std::set_union(p.begin(), p.end(), q.begin(), q.end(), std::back_inserter(out));
  return out;
}

bool all_zero(const Ineq& q) {
  return std::all_of(q.a.begin(), q.a.end(), [](const Rational& r) { return r.is_zero(); });
}

bool violated_constant(const Ineq& q) { return q.b.sign() < 0 || (q.b.is_zero() && q.strict); }

// Scale so the first nonzero coefficient has absolute value 1; identical
// inequalities then compare equal.
void canonicalize(Ineq& q) {
  for (const auto& c : q.a) {
    if (c.is_zero()) continue;
    Rational s = abs(c);
    for (auto& x : q.a) x /= s;
    q.b /= s;
    return;
  }
}

CoreResult fourier_motzkin(std::vector<Ineq> current, std::size_t nvars) {
  CoreResult result;
  std::vector<std::pair<std::size_t, std::vector<Ineq>>> stages;
  std::vector<bool> eliminated(nvars, false);

  auto check_constants = [&](std::vector<Ineq>& list) -> bool {
    for (auto it = list.begin(); it != list.end();) {
      if (all_zero(*it)) {
        if (violated_constant(*it)) {
          result.conflict = it->prov;
          return false;
        }
        it = list.erase(it);
      } else {
        ++it;
      }
    }
    return true;
  };
  if (!check_constants(current)) return result;

  for (;;) {
    std::size_t best = nvars;
    std::size_t best_cost = 0;
    for (std::size_t k = 0; k < nvars; ++k) {
      if (eliminated[k]) continue;
      std::size_t pos = 0, neg = 0;
      for (const auto& q : current) {
        if (q.a[k].sign() > 0) ++pos;
        else if (q.a[k].sign() < 0) ++neg;
      }
      if (pos + neg == 0) continue;
      std::size_t cost = pos * neg;
      if (best == nvars || cost < best_cost) {
        best = k;
        best_cost = cost;
      }
    }
    if (best == nvars) break;
    eliminated[best] = true;
    stages.emplace_back(best, current);

    std::vector<Ineq> next;
    std::vector<const Ineq*> pos, neg;
    for (const auto& q : current) {
      if (q.a[best].sign() > 0) pos.push_back(&q);
      else if (q.a[best].sign() < 0) neg.push_back(&q);
      else next.push_back(q);
    }
    for (const Ineq* p : pos) {
      for (const Ineq* n : neg) {
        const Rational wp = -n->a[best];
        const Rational wn = p->a[best];
        Ineq c;
        c.a.resize(nvars);
        for (std::size_t k = 0; k < nvars; ++k) c.a[k] = p->a[k] * wp + n->a[k] * wn;
        c.a[best] = Rational(0);
        c.b = p->b * wp + n->b * wn;
        c.strict = p->strict || n->strict;
        c.prov = merge_prov(p->prov, n->prov);
        canonicalize(c);
        auto dup = std::find_if(next.begin(), next.end(), [&](const Ineq& o) {
          return o.a == c.a && o.b == c.b && o.strict == c.strict;
        });
        if (dup == next.end()) next.push_back(std::move(c));
        else if (c.prov.size() < dup->prov.size()) dup->prov = c.prov;
      }
    }
    if (next.size() > kMaxInequalities)
      throw Error(ErrorKind::InvalidArgument, "feasibility problem too large for elimination");
    if (!check_constants(next)) return result;
    current = std::move(next);
  }

  // Back-substitution in reverse elimination order.
  result.feasible = true;
  result.x.assign(nvars, Rational(0));
  for (auto stage = stages.rbegin(); stage != stages.rend(); ++stage) {
    const std::size_t k = stage->first;
    std::optional<Rational> lo, hi;
    bool lo_strict = false, hi_strict = false;
    for (const auto& q : stage->second) {
      const Rational& ak = q.a[k];
      if (ak.is_zero()) continue;
      Rational rest = q.b;
      for (std::size_t j = 0; j < nvars; ++j)
        if (j != k) rest += q.a[j] * result.x[j];
      Rational v = -rest / ak;
      if (ak.sign() > 0) {
        if (!lo || v > *lo || (v == *lo && q.strict)) {
          lo_strict = (lo && v == *lo) ? (lo_strict || q.strict) : q.strict;
          lo = v;
        }
      } else {
        if (!hi || v < *hi || (v == *hi && q.strict)) {
          hi_strict = (hi && v == *hi) ? (hi_strict || q.strict) : q.strict;
          hi = v;
        }
      }
    }
    auto fits = [&](const Rational& v) {
      if (lo && (v < *lo || (v == *lo && lo_strict))) return false;
      if (hi && (v > *hi || (v == *hi && hi_strict))) return false;
      return true;
    };
    Rational choice(0);
    if (fits(choice)) {
    } else if (lo && !lo_strict && fits(*lo)) {
      choice = *lo;
    } else if (hi && !hi_strict && fits(*hi)) {
      choice = *hi;
    } else if (lo && hi) {
      choice = (*lo + *hi) / Rational(2);
    } else if (lo) {
      choice = *lo + Rational(1);
    } else {
      choice = *hi - Rational(1);
    }
    result.x[k] = choice;
  }
  return result;
}

struct Problem {
  std::vector<VarName> names;
  std::vector<Ineq> ineqs;
};

Problem build(const Conjunction& cs, const std::vector<std::size_t>& subset) {
  Problem p;
  VarSet vs;
  for (std::size_t i : subset) vs = varset_union(vs, cs[i].vars());
  p.names = vs;
  auto index = [&](const VarName& v) {
    return static_cast<std::size_t>(std::lower_bound(vs.begin(), vs.end(), v) - vs.begin());
  };
  for (std::size_t i : subset) {
    const auto& c = cs[i];
    if (c.nonzero_condition()) continue;  // automatic for finite valuations
    Ineq lhs;  // lhs - bound
    lhs.a.assign(vs.size(), Rational(0));
    for (const auto& [v, n] : c.form)
      if (!n.is_zero()) lhs.a[index(v)] = n;
    lhs.b = c.constant - c.bound.value();
    lhs.prov = {i};
    Ineq flipped = lhs;
    for (auto& x : flipped.a) x = -x;
    flipped.b = -flipped.b;
    switch (c.rel) {
      case Relation::Eq: p.ineqs.push_back(lhs); p.ineqs.push_back(flipped); break;
      case Relation::Ge: p.ineqs.push_back(lhs); break;
      case Relation::Gt: lhs.strict = true; p.ineqs.push_back(lhs); break;
      case Relation::Le: p.ineqs.push_back(flipped); break;
      case Relation::Lt: flipped.strict = true; p.ineqs.push_back(flipped); break;
    }
  }
  return p;
}

CoreResult solve_subset(const Conjunction& cs, const std::vector<std::size_t>& subset, Problem* out = nullptr) {
  Problem p = build(cs, subset);
  CoreResult r = fourier_motzkin(p.ineqs, p.names.size());
  if (out) *out = std::move(p);
  return r;
}

}  // namespace

FeasibilityResult feasible(const Conjunction& constraints) {
  for (const auto& c : constraints) {
    if (c.bound.is_infinite() && c.rel != Relation::Lt)
      throw Error(ErrorKind::InvalidArgument, "an infinite bound is only meaningful with '<': " + c.str());
  }
  std::vector<std::size_t> all(constraints.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  FeasibilityResult out;
  Problem p;
  CoreResult r = solve_subset(constraints, all, &p);
  if (r.feasible) {
    out.feasible = true;
    for (std::size_t k = 0; k < p.names.size(); ++k) out.witness.emplace(p.names[k], r.x[k]);
    return out;
  }
  // Deletion filter: drop every constraint whose removal keeps the set
  // infeasible; what remains is irreducible.
  std::vector<std::size_t> core = r.conflict;
  for (std::size_t i = 0; i < core.size();) {
    std::vector<std::size_t> trial = core;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (!solve_subset(constraints, trial).feasible) core = std::move(trial);
    else ++i;
  }
  Conjunction cert;
  for (std::size_t i : core) cert.push_back(constraints[i]);
  out.certificates.push_back(std::move(cert));
  return out;
}

FeasibilityResult feasible(const Domain& domain) {
  FeasibilityResult out;
  for (std::size_t i = 0; i < domain.clauses.size(); ++i) {
    FeasibilityResult r = feasible(domain.clauses[i]);
    if (r.feasible) {
      r.clause = i;
      r.certificates.clear();
      return r;
    }
    out.certificates.push_back(std::move(r.certificates.front()));
  }
  return out;
}

}  // namespace novikit
