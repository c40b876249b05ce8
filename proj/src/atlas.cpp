#include "novikit/atlas.hpp"

#include <algorithm>

#include "novikit/error.hpp"

namespace novikit {

const Chart& Atlas::chart(const std::string& name) const {
  for (const auto& c : charts)
    if (c.name == name) return c;
  throw Error(ErrorKind::UnknownChart, "no chart named '" + name + "'");
}

const Transition& Atlas::transition(const std::string& id) const {
  for (const auto& t : transitions)
    if (t.id == id) return t;
  throw Error(ErrorKind::UnknownTransition, "no transition with id '" + id + "'");
}

Transition Atlas::step(const std::string& step) const {
  constexpr std::string_view kIdentity = "identity:";
  constexpr std::string_view kInverse = "^-1";
  if (step.rfind(kIdentity, 0) == 0) return identity_transition(chart(step.substr(kIdentity.size())));
  if (step.size() > kInverse.size() && step.compare(step.size() - kInverse.size(), kInverse.size(), kInverse) == 0)
    return inverse_transition(transition(step.substr(0, step.size() - kInverse.size())));
  return transition(step);
}

Atlas Atlas::with_cutoffs(const ExtRational& energy, const DegreeCutoff& degree) const {
  Atlas out = *this;
  for (auto& c : out.charts) c.potential = c.potential.truncate(energy, degree);
  for (auto& t : out.transitions) {
    for (auto& [v, s] : t.map) s = s.truncate(energy, degree);
    if (t.inverse)
      for (auto& [v, s] : *t.inverse) s = s.truncate(energy, degree);
  }
  return out;
}

Transition identity_transition(const Chart& chart) {
  Transition t;
  t.id = "identity:" + chart.name;
  t.source = t.target = chart.name;
  t.source_vars = t.target_vars = chart.vars;
  t.overlap = t.inverse_overlap = chart.domain;
  for (const auto& v : chart.vars) t.map.emplace(v, MultiSeries::variable(chart.vars, v));
  t.inverse = t.map;
  return t;
}

Transition inverse_transition(const Transition& t) {
  if (!t.inverse)
    throw Error(ErrorKind::InvalidArgument, "transition '" + t.id + "' has no declared inverse");
  Transition r;
  constexpr std::string_view kInverse = "^-1";
  const bool already_inverse =
      t.id.size() > kInverse.size() && t.id.compare(t.id.size() - kInverse.size(), kInverse.size(), kInverse) == 0;
  r.id = already_inverse ? t.id.substr(0, t.id.size() - kInverse.size()) : t.id + std::string(kInverse);
  r.source = t.target;
  r.target = t.source;
  r.source_vars = t.target_vars;
  r.target_vars = t.source_vars;
  r.overlap = t.inverse_overlap;
  r.map = *t.inverse;
  r.inverse = t.map;
  r.inverse_overlap = t.overlap;
  r.approximate_overlap = t.approximate_overlap;
  return r;
}

PotentialReport check_potential_match(const Atlas& atlas, const Transition& t) {
  const Chart& src = atlas.chart(t.source);
  const Chart& dst = atlas.chart(t.target);
  PotentialReport r;
  r.residual = src.potential - substitute(dst.potential, t.map, src.vars);
  r.ok = r.residual.is_zero();
  return r;
}

namespace {

// val(c*m) = val(c) + sum_v m_v*val(v) as (constant, form).
std::pair<Rational, std::map<VarName, Rational>> term_valuation(const Monomial& m, const NovikovScalar& c) {
  std::map<VarName, Rational> form;
  for (const auto& [v, e] : m.exponents()) form[v] = Rational(e);
  return {c.val().value(), std::move(form)};
}

// Pulls one constraint back along `map`. Returns std::nullopt when it cannot
// be expressed exactly.
std::optional<Conjunction> pullback_constraint(const ValuationConstraint& k, const Assignment& map) {
  Conjunction out;
  if (k.nonzero_condition()) {
    for (const auto& [w, n] : k.form) {
      if (n.is_zero()) continue;
      if (n.sign() < 0) return std::nullopt;
      auto it = map.find(w);
      if (it == map.end()) throw Error(ErrorKind::VariableMismatch, "no image for '" + w + "'");
      if (it->second.is_zero()) {
        ValuationConstraint never;
        never.rel = Relation::Gt;  // 0 > 0
        out.push_back(never);
        continue;
      }
      if (!it->second.is_monomial()) return std::nullopt;
      for (const auto& [v, e] : it->second.terms().begin()->first.exponents())
        out.push_back(ValuationConstraint::on(v, Relation::Lt, ExtRational::infinity()));
    }
    return out;
  }
  ValuationConstraint r;
  r.rel = k.rel;
  r.bound = k.bound;
  r.constant = k.constant;
  for (const auto& [w, n] : k.form) {
    if (n.is_zero()) continue;
    auto it = map.find(w);
    if (it == map.end()) throw Error(ErrorKind::VariableMismatch, "no image for '" + w + "'");
    if (!it->second.is_monomial()) return std::nullopt;
    const auto& [m, c] = *it->second.terms().begin();
    auto [cv, form] = term_valuation(m, c);
    r.constant += n * cv;
    for (const auto& [v, e] : form) r.form[v] += n * e;
  }
  std::erase_if(r.form, [](const auto& kv) { return kv.second.is_zero(); });
  out.push_back(std::move(r));
  return out;
}

ValuationConstraint qualified(const ValuationConstraint& k, std::size_t index) {
  ValuationConstraint r = k;
  r.form.clear();
  for (const auto& [v, n] : k.form) r.form[v + "@" + std::to_string(index)] = n;
  return r;
}

Domain qualified(const Domain& d, std::size_t index) {
  Domain r = d;
  for (auto& clause : r.clauses)
    for (auto& k : clause) k = qualified(k, index);
  return r;
}

}  // namespace

Domain pullback(const Domain& d, const Assignment& map, bool& approximate) {
  Domain out;
  out.clauses.clear();
  for (const auto& clause : d.clauses) {
    Conjunction c;
    for (const auto& k : clause) {
      auto pulled = pullback_constraint(k, map);
      if (!pulled) {
        approximate = true;
        continue;
      }
      for (auto& p : *pulled)
        if (std::find(c.begin(), c.end(), p) == c.end()) c.push_back(std::move(p));
    }
    out.clauses.push_back(std::move(c));
  }
  return out;
}

Transition compose(const Transition& t1, const Transition& t2) {
  if (t1.target != t2.source)
    throw Error(ErrorKind::ChartMismatch, "cannot compose '" + t1.id + "' (to " + t1.target + ") with '" + t2.id +
                                              "' (from " + t2.source + ")");
  Transition r;
  r.id = t1.id + ";" + t2.id;
  r.source = t1.source;
  r.target = t2.target;
  r.source_vars = t1.source_vars;
  r.target_vars = t2.target_vars;
  for (const auto& [w, s] : t2.map) r.map.emplace(w, substitute(s, t1.map, t1.source_vars));
  bool approximate = t1.approximate_overlap || t2.approximate_overlap;
  r.overlap = intersect(t1.overlap, pullback(t2.overlap, t1.map, approximate));
  if (t1.inverse && t2.inverse) {
    Assignment inv;
    for (const auto& [v, s] : *t1.inverse) inv.emplace(v, substitute(s, *t2.inverse, t2.target_vars));
    r.inverse = std::move(inv);
    r.inverse_overlap = intersect(t2.inverse_overlap, pullback(t1.inverse_overlap, *t2.inverse, approximate));
  }
  r.approximate_overlap = approximate;
  return r;
}

std::string_view to_string(CocycleStatus s) {
  switch (s) {
    case CocycleStatus::Ok: return "ok";
    case CocycleStatus::Failed: return "failed";
    case CocycleStatus::EmptyOverlap: return "empty_overlap";
  }
  return "?";
}

CocycleReport verify_cocycle(const Atlas& atlas, const std::vector<std::string>& loop) {
  if (loop.empty()) throw Error(ErrorKind::InvalidArgument, "empty loop");
  CocycleReport r;
  Transition acc = atlas.step(loop.front());
  for (std::size_t i = 1; i < loop.size(); ++i) acc = compose(acc, atlas.step(loop[i]));
  if (acc.source != acc.target)
    throw Error(ErrorKind::ChartMismatch, "loop starts at " + acc.source + " but ends at " + acc.target);

  for (const auto& v : acc.source_vars) {
    auto it = acc.map.find(v);
    if (it == acc.map.end()) throw Error(ErrorKind::VariableMismatch, "loop map lacks variable '" + v + "'");
    r.residuals.emplace(v, it->second - MultiSeries::variable(acc.source_vars, v));
  }
  r.overlap_feasibility = feasible(acc.overlap);
  ChainConstraints honest = chain_constraints(atlas, loop, true);
  r.honest_feasibility = feasible(honest.domain);
  r.approximate = acc.approximate_overlap || honest.approximate;
  const bool identity = std::all_of(r.residuals.begin(), r.residuals.end(),
                                    [](const auto& kv) { return kv.second.is_zero(); });
  if (!r.overlap_feasibility.feasible) r.status = CocycleStatus::EmptyOverlap;
  else r.status = identity ? CocycleStatus::Ok : CocycleStatus::Failed;
  r.composed = std::move(acc);
  return r;
}

ChainConstraints chain_constraints(const Atlas& atlas, const std::vector<std::string>& steps, bool honest) {
  ChainConstraints out;
  if (steps.empty()) return out;
  std::vector<Transition> ts;
  for (const auto& s : steps) ts.push_back(atlas.step(s));
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    if (ts[k].target != ts[k + 1].source)
      throw Error(ErrorKind::ChartMismatch, "step '" + ts[k].id + "' ends at " + ts[k].target + " but '" +
                                                ts[k + 1].id + "' starts at " + ts[k + 1].source);
  }
  Domain d;
  if (honest) d = intersect(d, qualified(atlas.chart(ts.front().source).domain, 0));
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const Transition& t = ts[k];
    d = intersect(d, qualified(t.overlap, k));
    out.approximate = out.approximate || t.approximate_overlap;
    for (const auto& [w, image] : t.map) {
      const VarName target = w + "@" + std::to_string(k + 1);
      if (image.is_zero()) {
        out.approximate = true;
        continue;
      }
      Domain entry;
      entry.clauses.clear();
      for (const auto& [m, c] : image.terms()) {
        auto [cv, form] = term_valuation(m, c);
        ValuationConstraint rel;
        rel.form[target] = Rational(1);
        for (const auto& [v, e] : form) rel.form[v + "@" + std::to_string(k)] -= e;
        std::erase_if(rel.form, [](const auto& kv) { return kv.second.is_zero(); });
        rel.constant = -cv;
        rel.rel = image.is_monomial() ? Relation::Eq : Relation::Ge;
        rel.bound = Rational(0);
        entry.clauses.push_back({rel});
      }
      if (!image.is_monomial()) out.approximate = true;
      d = intersect(d, entry);
    }
    if (honest) d = intersect(d, qualified(atlas.chart(t.target).domain, k + 1));
  }
  out.domain = std::move(d);
  return out;
}

TransportResult transport_point(const Atlas& atlas, const Point& p, const Transition& t) {
  for (const auto& v : t.source_vars)
    if (!p.count(v))
      throw Error(ErrorKind::InvalidArgument, "point has no value for '" + v + "' of chart " + t.source);
  for (const auto& [v, s] : p)
    if (!std::binary_search(t.source_vars.begin(), t.source_vars.end(), v))
      throw Error(ErrorKind::VariableMismatch, "'" + v + "' is not a variable of chart " + t.source);

  const auto vals = valuations(p);
  if (auto bad = t.overlap.first_violation(vals))
    throw Error(ErrorKind::OutsideOverlap,
                "point violates overlap constraint " + bad->str() + " of transition '" + t.id + "'");
  TransportResult r;
  for (const auto& [w, s] : t.map) {
    try {
      r.point.emplace(w, evaluate(s, p));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DivisionByZero) throw;
      throw Error(ErrorKind::OutsideOverlap, "map entry " + w + " = " + s.str() + " is undefined at the point (" +
                                                 e.detail() + ")");
    }
  }
  r.honest = atlas.chart(t.source).domain.holds(vals) && atlas.chart(t.target).domain.holds(valuations(r.point));
  return r;
}

}  // namespace novikit
