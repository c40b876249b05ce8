#include "novikit/mc.hpp"

#include <algorithm>

#include "novikit/error.hpp"

namespace novikit {

std::string_view to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

std::string_view to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::Unit: return "unit";
    case GeneratorKind::Point: return "point";
    case GeneratorKind::Immersed: return "immersed";
    case GeneratorKind::Intersection: return "intersection";
    case GeneratorKind::Morse: return "morse";
  }
  return "?";
}

Parity parse_parity(std::string_view text) {
  if (text == "even") return Parity::Even;
  if (text == "odd") return Parity::Odd;
  throw Error(ErrorKind::ParseError, "unknown parity '" + std::string(text) + "'");
}

GeneratorKind parse_generator_kind(std::string_view text) {
  for (auto k : {GeneratorKind::Unit, GeneratorKind::Point, GeneratorKind::Immersed, GeneratorKind::Intersection,
                 GeneratorKind::Morse})
    if (text == to_string(k)) return k;
  throw Error(ErrorKind::ParseError, "unknown generator kind '" + std::string(text) + "'");
}

const Generator& DiscData::generator(const std::string& name) const {
  for (const auto& g : generators)
    if (g.name == name) return g;
  throw Error(ErrorKind::InvalidArgument, "unknown generator '" + name + "'");
}

VarSet DiscData::variables() const {
  std::vector<VarName> out;
  for (const auto& [g, v] : deformation.variables) out.push_back(v);
  for (const auto& c : contributions)
    for (const auto& h : c.holonomy) out.push_back(h.var);
  return make_varset(std::move(out));
}

// ---------------------------------------------------------------------------
// WordSeries

void WordSeries::add(const WordKey& key, const NovikovScalar& c) {
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

WordSeries& WordSeries::operator+=(const WordSeries& o) {
  for (const auto& [k, c] : o.terms_) add(k, c);
  return *this;
}

bool WordSeries::is_commutative() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& kv) { return kv.first.word.size() <= 1; });
}

MultiSeries WordSeries::commutative_image(const VarSet& vars) const {
  std::map<Monomial, NovikovScalar> acc;
  for (const auto& [k, c] : terms_) {
    Monomial m = k.monomial;
    for (const auto& v : k.word) m = m * Monomial::var(v);
    auto [it, inserted] = acc.try_emplace(m, c);
    if (!inserted) it->second += c;
  }
  return MultiSeries(vars, std::move(acc));
}

std::string WordSeries::str() const {
  std::string out;
  for (const auto& [k, c] : terms_) {
    std::string mono;
    for (std::size_t i = 0; i < k.word.size(); ++i) mono += (i ? "." : "") + k.word[i];
    if (!k.monomial.is_constant()) mono += (mono.empty() ? "" : "*") + k.monomial.str();
    std::string coeff = c.str();
    bool negative = false;
    std::string piece;
    if (mono.empty()) {
      piece = c.is_monomial() ? coeff : "(" + coeff + ")";
    } else if (c == NovikovScalar(1)) {
      piece = mono;
    } else if (c == NovikovScalar(-1)) {
      piece = "-" + mono;
    } else {
      piece = (c.is_monomial() ? coeff : "(" + coeff + ")") + "*" + mono;
    }
    if (piece.front() == '-') {
      negative = true;
      piece.erase(0, 1);
    }
    if (out.empty()) out = negative ? "-" + piece : piece;
    else out += (negative ? " - " : " + ") + piece;
  }
  return out.empty() ? "0" : out;
}

// ---------------------------------------------------------------------------
// Operations

Outputs apply_operation(const DiscData& data, const std::vector<std::vector<std::string>>& inputs,
                        const Cutoffs& cutoffs) {
  Outputs out;
  for (const auto& g : data.generators) out[g.name];
  const auto& defo = data.deformation.variables;
  for (const auto& c : data.contributions) {
    std::vector<std::string> word;  // deformation corners, reversed below
    std::size_t slot = 0;
    bool match = true;
    for (const auto& corner : c.corners) {
      auto d = defo.find(corner);
      if (d != defo.end()) {
        word.push_back(d->second);
        continue;
      }
      if (slot >= inputs.size() ||
          std::find(inputs[slot].begin(), inputs[slot].end(), corner) == inputs[slot].end()) {
        match = false;
        break;
      }
      ++slot;
    }
    if (!match || slot != inputs.size()) continue;
    if (ExtRational(c.area) >= cutoffs.energy) continue;

    std::reverse(word.begin(), word.end());
    Monomial mono;
    long degree = static_cast<long>(word.size());
    for (const auto& h : c.holonomy) {
      mono = mono * Monomial::var(h.var, h.power);
      degree += h.power;
    }
    if (cutoffs.degree && degree > *cutoffs.degree) continue;
    WordKey key;
    if (data.deformation.commutative) {
      for (const auto& v : word) mono = mono * Monomial::var(v);
    } else {
      key.word = std::move(word);
    }
    key.monomial = std::move(mono);
    if (!out.count(c.output)) throw Error(ErrorKind::InvalidArgument, "unknown output generator '" + c.output + "'");
    out[c.output].add(key, NovikovScalar::monomial(Gaussian(c.sign), c.area));
  }
  return out;
}

Outputs m0_deformed(const DiscData& data, const Cutoffs& cutoffs) { return apply_operation(data, {}, cutoffs); }

Outputs m1_between(const DiscData& data, const std::string& source, const Cutoffs& cutoffs) {
  return apply_operation(data, {{source}}, cutoffs);
}

std::string_view to_string(Obstruction o) {
  switch (o) {
    case Obstruction::Unobstructed: return "unobstructed";
    case Obstruction::Weakly: return "weakly_unobstructed";
    case Obstruction::Obstructed: return "obstructed";
  }
  return "?";
}

ObstructionReport classify_obstruction(const DiscData& data, const Outputs& m0) {
  ObstructionReport r;
  std::vector<std::string> nonzero_units;
  for (const auto& [g, s] : m0) {
    if (s.is_zero()) continue;
    if (data.generator(g).kind == GeneratorKind::Unit) nonzero_units.push_back(g);
    else r.residue.emplace(g, s);
  }
  if (!r.residue.empty() || nonzero_units.size() > 1) {
    r.kind = Obstruction::Obstructed;
    if (nonzero_units.size() > 1)
      for (const auto& u : nonzero_units) r.residue.emplace(u, m0.at(u));
    return r;
  }
  if (nonzero_units.empty()) return r;
  r.kind = Obstruction::Weakly;
  r.unit = nonzero_units.front();
  r.potential = m0.at(r.unit);
  return r;
}

// ---------------------------------------------------------------------------
// Cocycle solving

namespace {

// Splits s = c0 + c1*u when s is affine in u (u occurs with exponents 0 and
// 1 only, and at least once).
std::optional<std::pair<MultiSeries, MultiSeries>> affine_split(const MultiSeries& s, const VarName& u) {
  std::map<Monomial, NovikovScalar> c0, c1;
  for (const auto& [m, c] : s.terms()) {
    long e = m.exponent(u);
    if (e == 0) c0.emplace(m, c);
    else if (e == 1) c1.emplace(m.without(u), c);
    else return std::nullopt;
  }
  if (c1.empty()) return std::nullopt;
  return std::make_pair(MultiSeries(s.vars(), std::move(c0), s.energy_cutoff(), s.degree_cutoff()),
                        MultiSeries(s.vars(), std::move(c1), s.energy_cutoff(), s.degree_cutoff()));
}

}  // namespace

MultiSeries apply_relations(const MultiSeries& s, const Relations& relations) {
  VarSet vars = s.vars();
  for (const auto& [u, r] : relations) vars = varset_union(vars, varset_union(r.vars(), {u}));
  MultiSeries out = s.with_vars(vars);
  for (const auto& [u, r] : relations) out = substitute_partial(out, {{u, r.with_vars(vars)}});
  return out;
}

CocycleSolution solve_cocycle(const std::map<std::string, MultiSeries>& eqs, const std::vector<VarName>& unknowns) {
  VarSet vars = unknowns;
  vars = make_varset(vars);
  for (const auto& [g, s] : eqs) vars = varset_union(vars, s.vars());

  std::vector<std::pair<std::string, MultiSeries>> pending;
  for (const auto& [g, s] : eqs)
    if (!s.is_zero()) pending.emplace_back(g, s.with_vars(vars));

  CocycleSolution out;
  for (const auto& u : unknowns) {
    bool solved = false;
    std::string tried;
    for (auto it = pending.begin(); it != pending.end(); ++it) {
      auto split = affine_split(it->second, u);
      if (!split) continue;
      MultiSeries c1_inv;
      try {
        c1_inv = split->second.inverse();
      } catch (const Error& e) {
        tried += " " + it->first + " (coefficient " + split->second.str() + " is not invertible)";
        continue;
      }
      MultiSeries value = -(split->first * c1_inv);
      for (auto& [v, r] : out.relations) r = substitute_partial(r, {{u, value}});
      for (auto& [g, s] : pending) s = substitute_partial(s, {{u, value}});
      out.relations.emplace_back(u, value);
      pending.erase(it);
      solved = true;
      break;
    }
    if (!solved)
      throw Error(ErrorKind::NotSolvable,
                  "no equation is affine in '" + u + "' with an invertible coefficient" +
                      (tried.empty() ? std::string() : ";" + tried));
  }
  for (const auto& [g, s] : eqs) out.residual.emplace(g, apply_relations(s.with_vars(vars), out.relations));
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism witnesses

namespace {

CompositionCheck check_composition(const DiscData& data, const std::vector<std::vector<std::string>>& inputs,
                                   const Relations& relations, const std::string& expected, const Cutoffs& cutoffs) {
  CompositionCheck r;
  r.expected = expected;
  const VarSet vars = data.variables();
  for (const auto& [g, s] : apply_operation(data, inputs, cutoffs)) {
    MultiSeries image = apply_relations(s.commutative_image(vars), relations);
    r.outputs.emplace(g, image);
  }
  std::vector<std::string> nonzero;
  for (const auto& [g, s] : r.outputs)
    if (!s.is_zero()) nonzero.push_back(g);
  if (nonzero.size() != 1) {
    r.reason = nonzero.empty() ? "composition vanishes" : "composition has " + std::to_string(nonzero.size()) +
                                                              " nonzero outputs";
    return r;
  }
  const std::string& g = nonzero.front();
  const bool right_target = expected.empty() ? data.generator(g).kind == GeneratorKind::Unit : g == expected;
  if (!right_target) {
    r.reason = "composition lands on " + g + ", expected " + (expected.empty() ? "a unit" : expected);
    return r;
  }
  const MultiSeries& s = r.outputs.at(g);
  if (!s.is_constant() || !s.constant_term().is_monomial()) {
    r.reason = "coefficient of " + g + " is " + s.str() + ", not of the form c*T^e";
    return r;
  }
  r.expected = g;
  r.factor = s.constant_term();
  r.ok = true;
  return r;
}

}  // namespace

IsomorphismReport check_isomorphism_pair(const DiscData& forward, const std::vector<std::vector<std::string>>& fwd_inputs,
                                         const DiscData* backward,
                                         const std::vector<std::vector<std::string>>& bwd_inputs,
                                         const Relations& relations, const std::string& expected,
                                         const Cutoffs& cutoffs) {
  IsomorphismReport r;
  r.forward = check_composition(forward, fwd_inputs, relations, expected, cutoffs);
  r.ok = r.forward.ok;
  if (backward) {
    r.backward = check_composition(*backward, bwd_inputs, relations, expected, cutoffs);
    r.ok = r.ok && r.backward->ok;
  }
  return r;
}

}  // namespace novikit
