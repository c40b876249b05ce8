#include "novikit/serialize.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "novikit/error.hpp"

namespace novikit {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::ParseError, (path.empty() ? std::string("document") : path) + ": " + message);
}

// Runs a text parser and prefixes its errors with the JSON path.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    const ErrorKind kind = e.kind() == ErrorKind::VariableMismatch ? ErrorKind::ParseError : e.kind();
    throw Error(kind, path + ": " + e.detail());
  }
}

const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

Json rational_json(const Rational& r) { return r.str(); }

Json ext_json(const ExtRational& e) { return e.str(); }

}  // namespace

// ---------------------------------------------------------------------------
// Documents

Json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    auto pos = what.find("syntax error");
    if (pos != std::string::npos) what = what.substr(pos);
    throw Error(ErrorKind::ParseError,
                source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Numbers and parameters

std::string rational_str(const Rational& r) { return r.str(); }

Rational rational_from_json(const Json& j, const Parameters& params, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    return at_path(path, [&] { return parse_rational_expr(text, params); });
  }
  fail(path, "expected an integer or a rational string such as \"3/2\"");
}

Parameters parameters_from_json(const Json& j, const Parameters& overrides, const std::string& path) {
  Parameters params = overrides;
  if (j.is_null()) return params;
  if (!j.is_object()) fail(path, "parameters must be an object");
  for (const auto& [name, value] : j.items()) {
    if (overrides.count(name)) continue;
    params[name] = rational_from_json(value, params, child(path, name));
  }
  return params;
}

// ---------------------------------------------------------------------------
// Scalars and series

Json to_json(const NovikovScalar& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms())
    terms.push_back({{"exp", rational_json(t.exponent)},
                     {"re", rational_json(t.coefficient.re())},
                     {"im", rational_json(t.coefficient.im())}});
  return Json{{"terms", terms}, {"cutoff", ext_json(s.cutoff())}};
}

NovikovScalar scalar_from_json(const Json& j, const Parameters& params, const std::string& path) {
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    return at_path(path, [&] { return parse_scalar(text, params); });
  }
  if (j.is_number_integer()) return NovikovScalar(j.get<long>());
  if (!j.is_object()) fail(path, "expected a scalar object or expression string");
  std::vector<Term> terms;
  const Json& list = require(j, "terms", path);
  if (!list.is_array()) fail(child(path, "terms"), "expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = child(child(path, "terms"), i);
    Rational e = rational_from_json(require(list[i], "exp", p), params, child(p, "exp"));
    Rational re = list[i].contains("re") ? rational_from_json(list[i]["re"], params, child(p, "re")) : Rational(0);
    Rational im = list[i].contains("im") ? rational_from_json(list[i]["im"], params, child(p, "im")) : Rational(0);
    terms.push_back(Term{e, Gaussian(re, im)});
  }
  ExtRational cutoff = ExtRational::infinity();
  if (j.contains("cutoff")) {
    const Json& c = j["cutoff"];
    if (c.is_string() && c.get<std::string>() == "inf") cutoff = ExtRational::infinity();
    else cutoff = rational_from_json(c, params, child(path, "cutoff"));
  }
  return NovikovScalar(std::move(terms), cutoff);
}

Json to_json(const MultiSeries& s) {
  Json out = Json::array();
  for (const auto& [m, c] : s.terms()) {
    Json mono = Json::object();
    for (const auto& [v, e] : m.exponents()) mono[v] = e;
    out.push_back({{"monomial", mono}, {"coeff", to_json(c)}});
  }
  return out;
}

MultiSeries series_from_json(const Json& j, const VarSet& vars, const Parameters& params, const std::string& path) {
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    return at_path(path, [&] { return parse_series(text, vars, params); });
  }
  if (j.is_number_integer()) return MultiSeries::constant(vars, NovikovScalar(j.get<long>()));
  if (!j.is_array()) fail(path, "expected a term list or an expression string");
  MultiSeries out(vars);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = child(path, i);
    const Json& mono = require(j[i], "monomial", p);
    if (!mono.is_object()) fail(child(p, "monomial"), "expected an object");
    std::map<VarName, long> exps;
    for (const auto& [v, e] : mono.items()) {
      if (!e.is_number_integer()) fail(child(child(p, "monomial"), v), "exponent must be an integer");
      if (!std::binary_search(vars.begin(), vars.end(), v)) fail(child(p, "monomial"), "unknown variable '" + v + "'");
      exps[v] = e.get<long>();
    }
    NovikovScalar c = scalar_from_json(require(j[i], "coeff", p), params, child(p, "coeff"));
    out += MultiSeries::term(vars, Monomial(exps), c);
  }
  return out;
}

Json to_json(const Point& p) {
  Json out = Json::object();
  for (const auto& [v, s] : p) out[v] = to_json(s);
  return out;
}

Point point_from_json(const Json& j, const Parameters& params, const std::string& path) {
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    return at_path(path, [&] { return parse_point(text, params); });
  }
  if (!j.is_object()) fail(path, "expected a point object or literal");
  Point out;
  for (const auto& [v, s] : j.items()) out.emplace(v, scalar_from_json(s, params, child(path, v)));
  return out;
}

// ---------------------------------------------------------------------------
// Constraints and domains

Json to_json(const ValuationConstraint& c) {
  Json form = Json::object();
  for (const auto& [v, n] : c.form) form[v] = n.is_integer() ? Json(n.to_long()) : Json(n.str());
  Json out{{"form", form}};
  if (!c.constant.is_zero()) out["const"] = rational_json(c.constant);
  out["rel"] = std::string(to_string(c.rel));
  out["bound"] = ext_json(c.bound);
  return out;
}

ValuationConstraint constraint_from_text(std::string_view text, const Parameters& params) {
  static const std::vector<std::string> kRelations{"<=", ">=", "==", "=", "<", ">"};
  std::size_t at = std::string_view::npos;
  std::string rel;
  for (std::size_t i = 0; i < text.size() && at == std::string_view::npos; ++i) {
    for (const auto& r : kRelations) {
      if (text.substr(i, r.size()) == r) {
        at = i;
        rel = r;
        break;
      }
    }
  }
  if (at == std::string_view::npos)
    throw Error(ErrorKind::ParseError, "constraint \"" + std::string(text) + "\" has no relation");
  const std::regex val_re(R"(val\s*\(\s*([A-Za-z_][A-Za-z0-9_']*)\s*\))");
  std::vector<VarName> names;
  auto rewrite = [&](std::string side) {
    std::string out;
    auto begin = std::sregex_iterator(side.begin(), side.end(), val_re);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
      out += side.substr(last, static_cast<std::size_t>(it->position()) - last);
      out += "(" + (*it)[1].str() + ")";
      names.push_back((*it)[1].str());
      last = static_cast<std::size_t>(it->position() + it->length());
    }
    return out + side.substr(last);
  };
  std::string lhs = rewrite(std::string(text.substr(0, at)));
  std::string rhs_raw(text.substr(at + rel.size()));
  std::string rhs = rewrite(rhs_raw);
  const VarSet vars = make_varset(names);
  for (const auto& v : vars)
    if (params.count(v)) throw Error(ErrorKind::ParseError, "'" + v + "' is both a variable and a parameter");

  ValuationConstraint c;
  c.rel = parse_relation(rel);
  auto linear = [&](const MultiSeries& s) {
    for (const auto& [m, k] : s.terms()) {
      if (!k.is_monomial() || !k.terms().front().exponent.is_zero() || !k.leading_coefficient().is_real())
        throw Error(ErrorKind::ParseError, "coefficients in \"" + std::string(text) + "\" must be rational");
      if (m.is_constant()) {
        c.constant += k.leading_coefficient().re();
        continue;
      }
      if (m.exponents().size() != 1 || m.exponents().begin()->second != 1)
        throw Error(ErrorKind::ParseError, "constraint \"" + std::string(text) + "\" is not linear in valuations");
      c.form[m.exponents().begin()->first] += k.leading_coefficient().re();
    }
  };
  std::string rhs_trim = rhs_raw;
  rhs_trim.erase(0, rhs_trim.find_first_not_of(" \t"));
  rhs_trim.erase(rhs_trim.find_last_not_of(" \t") + 1);
  if (rhs_trim == "inf" || rhs_trim == "+inf") {
    if (c.rel != Relation::Lt)
      throw Error(ErrorKind::ParseError, "an infinite bound needs '<' in \"" + std::string(text) + "\"");
    linear(parse_series(lhs, vars, params));
    c.bound = ExtRational::infinity();
  } else {
    linear(parse_series(lhs, vars, params) - parse_series(rhs, vars, params));
    c.bound = Rational(0);
    if (!c.form.empty()) {
      c.bound = -c.constant;
      c.constant = Rational(0);
    }
  }
  std::erase_if(c.form, [](const auto& kv) { return kv.second.is_zero(); });
  return c;
}

ValuationConstraint constraint_from_json(const Json& j, const Parameters& params, const std::string& path) {
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    return at_path(path, [&] { return constraint_from_text(text, params); });
  }
  ValuationConstraint c;
  const Json& form = require(j, "form", path);
  if (!form.is_object()) fail(child(path, "form"), "expected an object");
  for (const auto& [v, n] : form.items()) c.form[v] = rational_from_json(n, params, child(child(path, "form"), v));
  std::erase_if(c.form, [](const auto& kv) { return kv.second.is_zero(); });
  if (j.contains("const")) c.constant = rational_from_json(j["const"], params, child(path, "const"));
  c.rel = at_path(child(path, "rel"), [&] { return parse_relation(require_string(require(j, "rel", path), path)); });
  const Json& b = require(j, "bound", path);
  if (b.is_string() && (b.get<std::string>() == "inf" || b.get<std::string>() == "+inf")) {
    if (c.rel != Relation::Lt) fail(child(path, "bound"), "an infinite bound needs rel \"<\"");
    c.bound = ExtRational::infinity();
  } else {
    c.bound = rational_from_json(b, params, child(path, "bound"));
  }
  return c;
}

Json to_json(const Domain& d) {
  auto conj = [](const Conjunction& c) {
    Json out = Json::array();
    for (const auto& k : c) out.push_back(to_json(k));
    return out;
  };
  if (d.clauses.size() == 1) return conj(d.clauses.front());
  Json any = Json::array();
  for (const auto& c : d.clauses) any.push_back(conj(c));
  return Json{{"any", any}};
}

Domain domain_from_json(const Json& j, const VarSet& ambient, const Parameters& params, const std::string& path) {
  auto conj = [&](const Json& list, const std::string& p) {
    if (!list.is_array()) fail(p, "expected a list of constraints");
    Conjunction out;
    for (std::size_t i = 0; i < list.size(); ++i) {
      ValuationConstraint c = constraint_from_json(list[i], params, child(p, i));
      if (!ambient.empty()) {
        for (const auto& v : c.vars())
          if (!std::binary_search(ambient.begin(), ambient.end(), v))
            fail(child(p, i), "constraint mentions '" + v + "', which is not a chart variable");
      }
      out.push_back(std::move(c));
    }
    return out;
  };
  if (j.is_null()) return Domain::all();
  if (j.is_object()) {
    const Json& any = require(j, "any", path);
    if (!any.is_array()) fail(child(path, "any"), "expected a list of conjunctions");
    Domain d;
    d.clauses.clear();
    for (std::size_t i = 0; i < any.size(); ++i) d.clauses.push_back(conj(any[i], child(child(path, "any"), i)));
    return d;
  }
  return Domain::of(conj(j, path));
}

// ---------------------------------------------------------------------------
// Atlas

Json to_json(const Chart& c) {
  return Json{{"name", c.name}, {"vars", c.vars}, {"domain", to_json(c.domain)}, {"potential", to_json(c.potential)}};
}

Json to_json(const Transition& t) {
  Json out{{"id", t.id}, {"src", t.source}, {"dst", t.target}, {"overlap", to_json(t.overlap)}};
  Json map = Json::object();
  for (const auto& [v, s] : t.map) map[v] = to_json(s);
  out["map"] = map;
  if (t.inverse) {
    Json inv = Json::object();
    for (const auto& [v, s] : *t.inverse) inv[v] = to_json(s);
    out["inverse"] = inv;
    out["inverse_overlap"] = to_json(t.inverse_overlap);
  }
  if (t.approximate_overlap) out["approximate"] = true;
  return out;
}

Json to_json(const Atlas& a) {
  Json charts = Json::array();
  for (const auto& c : a.charts) charts.push_back(to_json(c));
  Json transitions = Json::array();
  for (const auto& t : a.transitions) transitions.push_back(to_json(t));
  return Json{{"charts", charts}, {"transitions", transitions}, {"loops", a.loops}};
}

namespace {

Assignment assignment_from_json(const Json& j, const VarSet& keys, const VarSet& vars, const Parameters& params,
                                const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object mapping variables to series");
  Assignment out;
  for (const auto& [v, s] : j.items()) {
    if (!std::binary_search(keys.begin(), keys.end(), v)) fail(child(path, v), "'" + v + "' is not a target variable");
    out.emplace(v, series_from_json(s, vars, params, child(path, v)));
  }
  for (const auto& v : keys)
    if (!out.count(v)) fail(path, "no image given for '" + v + "'");
  return out;
}

}  // namespace

Atlas atlas_from_json(const Json& j, const Parameters& overrides) {
  if (!j.is_object()) fail("", "an atlas must be a JSON object");
  const Parameters params = parameters_from_json(j.contains("parameters") ? j["parameters"] : Json(), overrides,
                                                 "/parameters");
  Atlas atlas;
  const Json& charts = require(j, "charts", "");
  if (!charts.is_array()) fail("/charts", "expected an array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < charts.size(); ++i) {
    const std::string p = child("/charts", i);
    Chart c;
    c.name = require_string(require(charts[i], "name", p), child(p, "name"));
    if (!names.insert(c.name).second) fail(p, "duplicate chart '" + c.name + "'");
    const Json& vars = require(charts[i], "vars", p);
    if (!vars.is_array()) fail(child(p, "vars"), "expected an array of names");
    std::vector<VarName> vs;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      std::string v = require_string(vars[k], child(child(p, "vars"), k));
      if (v.empty() || v == "T" || v == "i" || v == "O" || params.count(v))
        fail(child(child(p, "vars"), k), "'" + v + "' cannot be a variable name");
      vs.push_back(v);
    }
    c.vars = make_varset(vs);
    if (c.vars.size() != vs.size()) fail(child(p, "vars"), "duplicate variable");
    c.domain = domain_from_json(charts[i].contains("domain") ? charts[i]["domain"] : Json(), c.vars, params,
                                child(p, "domain"));
    c.potential = charts[i].contains("potential")
                      ? series_from_json(charts[i]["potential"], c.vars, params, child(p, "potential"))
                      : MultiSeries(c.vars);
    atlas.charts.push_back(std::move(c));
  }

  const Json transitions = j.contains("transitions") ? j["transitions"] : Json::array();
  if (!transitions.is_array()) fail("/transitions", "expected an array");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const std::string p = child("/transitions", i);
    const Json& tj = transitions[i];
    Transition t;
    t.id = require_string(require(tj, "id", p), child(p, "id"));
    if (!ids.insert(t.id).second) fail(p, "duplicate transition id '" + t.id + "'");
    t.source = require_string(require(tj, "src", p), child(p, "src"));
    t.target = require_string(require(tj, "dst", p), child(p, "dst"));
    const Chart* src = nullptr;
    const Chart* dst = nullptr;
    for (const auto& c : atlas.charts) {
      if (c.name == t.source) src = &c;
      if (c.name == t.target) dst = &c;
    }
    if (!src) fail(child(p, "src"), "unknown chart '" + t.source + "'");
    if (!dst) fail(child(p, "dst"), "unknown chart '" + t.target + "'");
    t.source_vars = src->vars;
    t.target_vars = dst->vars;
    t.overlap = domain_from_json(tj.contains("overlap") ? tj["overlap"] : Json(), src->vars, params, child(p, "overlap"));
    t.map = assignment_from_json(require(tj, "map", p), dst->vars, src->vars, params, child(p, "map"));
    if (tj.contains("inverse")) {
      t.inverse = assignment_from_json(tj["inverse"], src->vars, dst->vars, params, child(p, "inverse"));
      t.inverse_overlap = domain_from_json(tj.contains("inverse_overlap") ? tj["inverse_overlap"] : Json(), dst->vars,
                                           params, child(p, "inverse_overlap"));
    }
    if (tj.contains("approximate")) t.approximate_overlap = tj["approximate"].get<bool>();
    atlas.transitions.push_back(std::move(t));
  }

  if (j.contains("loops")) {
    const Json& loops = j["loops"];
    if (!loops.is_array()) fail("/loops", "expected an array of step lists");
    for (std::size_t i = 0; i < loops.size(); ++i) {
      if (!loops[i].is_array()) fail(child("/loops", i), "expected an array of steps");
      std::vector<std::string> steps;
      for (std::size_t k = 0; k < loops[i].size(); ++k) {
        std::string s = require_string(loops[i][k], child(child("/loops", i), k));
        at_path(child(child("/loops", i), k), [&] { return atlas.step(s); });
        steps.push_back(std::move(s));
      }
      atlas.loops.push_back(std::move(steps));
    }
  }
  return atlas;
}

// ---------------------------------------------------------------------------
// Disc data

Json to_json(const DiscData& d) {
  Json gens = Json::array();
  for (const auto& g : d.generators)
    gens.push_back({{"name", g.name},
                    {"parity", std::string(to_string(g.parity))},
                    {"kind", std::string(to_string(g.kind))},
                    {"object", g.object}});
  Json defo = Json::object();
  for (const auto& [g, v] : d.deformation.variables) defo[g] = v;
  Json contribs = Json::array();
  for (const auto& c : d.contributions) {
    Json hol = Json::array();
    for (const auto& h : c.holonomy) hol.push_back({{"var", h.var}, {"power", h.power}});
    contribs.push_back({{"corners", c.corners},
                        {"output", c.output},
                        {"area", rational_json(c.area)},
                        {"sign", c.sign},
                        {"holonomy", hol}});
  }
  Json out{{"generators", gens}, {"deformation", defo}, {"commutative", d.deformation.commutative}};
  if (!d.object_pairs.empty()) {
    Json pairs = Json::array();
    for (const auto& [a, b] : d.object_pairs) pairs.push_back({a, b});
    out["object_pairs"] = pairs;
  }
  out["contributions"] = contribs;
  return out;
}

DiscData disc_data_from_json(const Json& j, const Parameters& overrides) {
  if (!j.is_object()) fail("", "disc data must be a JSON object");
  const Parameters params = parameters_from_json(j.contains("parameters") ? j["parameters"] : Json(), overrides,
                                                 "/parameters");
  DiscData d;
  const Json& gens = require(j, "generators", "");
  if (!gens.is_array()) fail("/generators", "expected an array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string p = child("/generators", i);
    Generator g;
    g.name = require_string(require(gens[i], "name", p), child(p, "name"));
    if (!names.insert(g.name).second) fail(p, "duplicate generator '" + g.name + "'");
    if (gens[i].contains("parity"))
      g.parity = at_path(child(p, "parity"), [&] { return parse_parity(require_string(gens[i]["parity"], p)); });
    if (gens[i].contains("kind"))
      g.kind = at_path(child(p, "kind"), [&] { return parse_generator_kind(require_string(gens[i]["kind"], p)); });
    if (gens[i].contains("object")) g.object = require_string(gens[i]["object"], child(p, "object"));
    d.generators.push_back(std::move(g));
  }
  if (j.contains("deformation")) {
    const Json& defo = j["deformation"];
    if (!defo.is_object()) fail("/deformation", "expected an object mapping generators to variables");
    std::set<VarName> used;
    for (const auto& [g, v] : defo.items()) {
      if (!names.count(g)) fail(child("/deformation", g), "unknown generator '" + g + "'");
      std::string var = require_string(v, child("/deformation", g));
      if (!used.insert(var).second) fail(child("/deformation", g), "variable '" + var + "' used twice");
      d.deformation.variables.emplace(g, var);
    }
  }
  if (j.contains("commutative")) {
    if (!j["commutative"].is_boolean()) fail("/commutative", "expected true or false");
    d.deformation.commutative = j["commutative"].get<bool>();
  }
  if (j.contains("object_pairs")) {
    const Json& pairs = j["object_pairs"];
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!pairs[i].is_array() || pairs[i].size() != 2) fail(child("/object_pairs", i), "expected a pair");
      d.object_pairs.emplace_back(require_string(pairs[i][0], child("/object_pairs", i)),
                                  require_string(pairs[i][1], child("/object_pairs", i)));
    }
  }
  const Json contribs = j.contains("contributions") ? j["contributions"] : Json::array();
  if (!contribs.is_array()) fail("/contributions", "expected an array");
  for (std::size_t i = 0; i < contribs.size(); ++i) {
    const std::string p = child("/contributions", i);
    const Json& cj = contribs[i];
    DiscContribution c;
    const Json corners = cj.contains("corners") ? cj["corners"] : Json::array();
    if (!corners.is_array()) fail(child(p, "corners"), "expected an array");
    for (std::size_t k = 0; k < corners.size(); ++k) {
      std::string g = require_string(corners[k], child(child(p, "corners"), k));
      if (!names.count(g)) fail(child(child(p, "corners"), k), "unknown generator '" + g + "'");
      c.corners.push_back(std::move(g));
    }
    c.output = require_string(require(cj, "output", p), child(p, "output"));
    if (!names.count(c.output)) fail(child(p, "output"), "unknown generator '" + c.output + "'");
    c.area = cj.contains("area") ? rational_from_json(cj["area"], params, child(p, "area")) : Rational(0);
    if (c.area.sign() < 0) fail(child(p, "area"), "area must be non-negative");
    if (cj.contains("sign")) {
      if (!cj["sign"].is_number_integer() || (cj["sign"].get<int>() != 1 && cj["sign"].get<int>() != -1))
        fail(child(p, "sign"), "sign must be 1 or -1");
      c.sign = cj["sign"].get<int>();
    }
    if (cj.contains("holonomy")) {
      const Json& hol = cj["holonomy"];
      if (!hol.is_array()) fail(child(p, "holonomy"), "expected an array");
      for (std::size_t k = 0; k < hol.size(); ++k) {
        const std::string hp = child(child(p, "holonomy"), k);
        HolonomyFactor h;
        h.var = require_string(require(hol[k], "var", hp), child(hp, "var"));
        if (hol[k].contains("power")) {
          if (!hol[k]["power"].is_number_integer()) fail(child(hp, "power"), "expected an integer");
          h.power = hol[k]["power"].get<long>();
        }
        if (h.power == 0) fail(child(hp, "power"), "crossing count must be nonzero");
        c.holonomy.push_back(std::move(h));
      }
    }
    d.contributions.push_back(std::move(c));
  }
  return d;
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const WordSeries& s) { return s.str(); }

Json to_json(const Outputs& o) {
  Json out = Json::object();
  for (const auto& [g, s] : o) out[g] = s.str();
  return out;
}

Json to_json(const FeasibilityResult& r) {
  Json out{{"feasible", r.feasible}};
  if (r.feasible) {
    Json w = Json::object();
    for (const auto& [v, x] : r.witness) w[v] = rational_json(x);
    out["witness"] = w;
    out["clause"] = r.clause;
  } else {
    Json certs = Json::array();
    for (const auto& c : r.certificates) {
      Json list = Json::array();
      for (const auto& k : c) list.push_back(k.str());
      certs.push_back(list);
    }
    out["certificates"] = certs;
  }
  return out;
}

Json to_json(const PotentialReport& r) { return Json{{"ok", r.ok}, {"residual", r.residual.str()}}; }

Json to_json(const CocycleReport& r) {
  Json map = Json::object();
  for (const auto& [v, s] : r.composed.map) map[v] = s.str();
  Json residuals = Json::object();
  for (const auto& [v, s] : r.residuals) residuals[v] = s.str();
  return Json{{"status", std::string(to_string(r.status))},
              {"composed", r.composed.id},
              {"map", map},
              {"residuals", residuals},
              {"overlap", r.composed.overlap.str()},
              {"overlap_feasibility", to_json(r.overlap_feasibility)},
              {"honest_feasibility", to_json(r.honest_feasibility)},
              {"approximate", r.approximate}};
}

Json to_json(const TransportResult& r) {
  Json text = Json::object();
  for (const auto& [v, s] : r.point) text[v] = s.str();
  return Json{{"point", to_json(r.point)}, {"text", text}, {"regime", r.honest ? "honest" : "pseudo"}};
}

Json to_json(const ObstructionReport& r) {
  Json out{{"classification", std::string(to_string(r.kind))}};
  if (r.kind == Obstruction::Weakly) {
    out["unit"] = r.unit;
    out["potential"] = r.potential.str();
  }
  if (r.kind == Obstruction::Obstructed) out["residue"] = to_json(r.residue);
  return out;
}

Json to_json(const CocycleSolution& s) {
  Json rel = Json::array();
  for (const auto& [v, x] : s.relations) rel.push_back({{"var", v}, {"value", x.str()}});
  Json res = Json::object();
  for (const auto& [g, x] : s.residual) res[g] = x.str();
  return Json{{"relations", rel}, {"residual", res}};
}

namespace {

Json composition_json(const CompositionCheck& c) {
  Json outputs = Json::object();
  for (const auto& [g, s] : c.outputs) outputs[g] = s.str();
  Json out{{"ok", c.ok}, {"expected", c.expected}, {"outputs", outputs}};
  if (c.factor) out["factor"] = c.factor->str();
  if (!c.reason.empty()) out["reason"] = c.reason;
  return out;
}

Json point_json(const CriticalPoint& p) {
  Json text = Json::object();
  for (const auto& [v, s] : p.coordinates) text[v] = s.str();
  return Json{{"coordinates", to_json(p.coordinates)},
              {"text", text},
              {"value", to_json(p.value)},
              {"value_text", p.value.str()},
              {"lifted_to", ext_json(p.lifted_to)},
              {"residual_valuation", ext_json(p.residual_valuation)},
              {"iterations", p.iterations}};
}

Json component_json(const CriticalComponent& c) {
  return Json{{"zero", c.zero_vars}, {"free", c.free_vars}, {"text", c.str()}};
}

}  // namespace

Json to_json(const IsomorphismReport& r) {
  Json out{{"ok", r.ok}, {"forward", composition_json(r.forward)}};
  if (r.backward) out["backward"] = composition_json(*r.backward);
  return out;
}

Json to_json(const CriticalLocus& l) {
  Json points = Json::array(), excluded = Json::array(), comps = Json::array(), excomps = Json::array();
  for (const auto& p : l.points) points.push_back(point_json(p));
  for (const auto& p : l.excluded) excluded.push_back(point_json(p));
  for (const auto& c : l.components) comps.push_back(component_json(c));
  for (const auto& c : l.excluded_components) excomps.push_back(component_json(c));
  Json degenerate = Json::array();
  for (const auto& d : l.degenerate)
    degenerate.push_back({{"exponent", rational_json(d.exponent)},
                          {"coefficient", d.coefficient.str()},
                          {"multiplicity", d.multiplicity}});
  Json unresolved = Json::array();
  for (const auto& u : l.unresolved) unresolved.push_back(u.str());
  return Json{{"target", ext_json(l.target)},      {"points", points},
              {"excluded", excluded},              {"components", comps},
              {"excluded_components", excomps},    {"degenerate", degenerate},
              {"unresolved", unresolved},          {"free_vars", l.free_vars}};
}

}  // namespace novikit
