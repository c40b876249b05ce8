#include "novikit/models.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>

#include "novikit/error.hpp"

#ifndef NOVIKIT_MODEL_DIR
#define NOVIKIT_MODEL_DIR "models"
#endif

namespace novikit {

namespace fs = std::filesystem;

std::string model_directory() {
  if (const char* env = std::getenv("NOVIKIT_MODEL_DIR"); env && *env) return env;
  return NOVIKIT_MODEL_DIR;
}

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"p1", "pants", "four-punctured", "paradox", "three-pants",
                                              "wall-crossing"};
  return names;
}

namespace {

Json file_params(const Json& doc) {
  return doc.is_object() && doc.contains("parameters") ? doc["parameters"] : Json();
}

/// Reads a file named in the manifest and prefixes parse errors with it.
Json read_member(const fs::path& dir, const Json& entry, const std::string& path) {
  if (!entry.is_string()) throw Error(ErrorKind::ParseError, "manifest.json: " + path + ": expected a file name");
  return read_json_file((dir / entry.get<std::string>()).string());
}

template <class F>
auto in_file(const std::string& file, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ParseError) throw;
    throw Error(ErrorKind::ParseError, file + ": " + e.detail());
  }
}

}  // namespace

Domain constraint_file_from_json(const Json& j, const Parameters& overrides) {
  if (j.is_null()) return Domain::all();
  if (j.is_object() && !j.contains("any")) {
    const Parameters params = parameters_from_json(file_params(j), overrides, "/parameters");
    return domain_from_json(j.contains("constraints") ? j["constraints"] : Json(), {}, params, "/constraints");
  }
  return domain_from_json(j, {}, overrides, "");
}

Atlas ModelBundle::atlas_with(const Parameters& params) const {
  if (!atlas_doc) throw Error(ErrorKind::InvalidArgument, "model '" + name + "' has no atlas");
  return atlas_from_json(*atlas_doc, params);
}

DiscData ModelBundle::discs_with(const std::string& key, const Parameters& params) const {
  auto it = disc_docs.find(key);
  if (it == disc_docs.end()) throw Error(ErrorKind::InvalidArgument, "model '" + name + "' has no disc data '" + key + "'");
  return disc_data_from_json(it->second, params);
}

Domain ModelBundle::constraints_with(const std::string& key, const Parameters& params) const {
  auto it = constraint_docs.find(key);
  if (it == constraint_docs.end())
    throw Error(ErrorKind::InvalidArgument, "model '" + name + "' has no constraint file '" + key + "'");
  return constraint_file_from_json(it->second, params);
}

ModelBundle load_model(const std::string& name, const Parameters& overrides) {
  const auto& names = model_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorKind::UnknownModel, "'" + name + "' (known models: " + known + ")");
  }
  return load_model_dir((fs::path(model_directory()) / name).string(), overrides);
}

ModelBundle load_model_dir(const std::string& directory, const Parameters& overrides) {
  const fs::path dir(directory);
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path))
    throw Error(ErrorKind::UnknownModel, "no manifest.json in " + dir.string());

  ModelBundle b;
  b.directory = dir.string();
  b.overrides = overrides;
  b.manifest = read_json_file(manifest_path.string());
  const Json& m = b.manifest;
  if (!m.is_object()) throw Error(ErrorKind::ParseError, "manifest.json: expected an object");
  b.name = m.value("name", dir.filename().string());
  b.description = m.value("description", "");

  if (m.contains("atlas")) b.atlas_doc = read_member(dir, m["atlas"], "/atlas");
  for (const char* section : {"discs", "constraints"}) {
    if (!m.contains(section)) continue;
    if (!m[section].is_object())
      throw Error(ErrorKind::ParseError, std::string("manifest.json: /") + section + ": expected an object");
    auto& docs = std::string(section) == "discs" ? b.disc_docs : b.constraint_docs;
    for (const auto& [key, file] : m[section].items())
      docs.emplace(key, read_member(dir, file, std::string("/") + section + "/" + key));
  }
  if (m.contains("parameter_sets")) {
    for (const auto& [key, set] : m["parameter_sets"].items())
      b.parameter_sets.emplace(key, in_file("manifest.json", [&] {
                                 return parameters_from_json(set, {}, "/parameter_sets/" + key);
                               }));
  }
  if (!m.contains("checks") || !m["checks"].is_array())
    throw Error(ErrorKind::ParseError, "manifest.json: /checks: expected an array");

  if (b.atlas_doc)
    b.atlas = in_file(m["atlas"].get<std::string>(), [&] { return atlas_from_json(*b.atlas_doc, overrides); });
  for (const auto& [key, doc] : b.disc_docs)
    b.discs.emplace(key, in_file(m["discs"][key].get<std::string>(), [&] { return disc_data_from_json(doc, overrides); }));
  for (const auto& [key, doc] : b.constraint_docs)
    in_file(m["constraints"][key].get<std::string>(), [&] { return constraint_file_from_json(doc, overrides); });
  return b;
}

bool ManifestReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

struct CheckContext {
  const ModelBundle& bundle;
  const RunOptions& options;
  const Json& check;
  Parameters overrides;

  Cutoffs cutoffs() const { return Cutoffs{options.energy, options.degree}; }

  Atlas atlas() const { return bundle.atlas_with(overrides).with_cutoffs(options.energy, options.degree); }
  Parameters atlas_params() const { return parameters_from_json(file_params(*bundle.atlas_doc), overrides, "/parameters"); }

  DiscData discs(const std::string& key) const { return bundle.discs_with(key, overrides); }
  Parameters disc_params(const std::string& key) const {
    return parameters_from_json(file_params(bundle.disc_docs.at(key)), overrides, "/parameters");
  }

  const Json& field(const char* key) const {
    auto it = check.find(key);
    if (it == check.end()) throw Error(ErrorKind::InvalidArgument, std::string("check has no \"") + key + "\" field");
    return *it;
  }
  std::string string_field(const char* key) const {
    const Json& j = field(key);
    if (!j.is_string()) throw Error(ErrorKind::InvalidArgument, std::string("\"") + key + "\" must be a string");
    return j.get<std::string>();
  }
  std::vector<std::string> string_list(const char* key) const {
    const Json& j = field(key);
    if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, std::string("\"") + key + "\" must be a list");
    std::vector<std::string> out;
    for (const auto& s : j) out.push_back(s.get<std::string>());
    return out;
  }
  std::vector<std::vector<std::string>> slots(const char* key) const {
    std::vector<std::vector<std::string>> out;
    for (const auto& slot : field(key)) out.push_back(slot.get<std::vector<std::string>>());
    return out;
  }
};

Parameters check_overrides(const ModelBundle& b, const Json& check) {
  Parameters params;
  if (check.contains("parameters")) {
    const Json& p = check["parameters"];
    if (p.is_string()) {
      auto it = b.parameter_sets.find(p.get<std::string>());
      if (it == b.parameter_sets.end())
        throw Error(ErrorKind::InvalidArgument, "unknown parameter set '" + p.get<std::string>() + "'");
      params = it->second;
    } else {
      params = parameters_from_json(p, {}, "/parameters");
    }
  }
  for (const auto& [k, v] : b.overrides) params[k] = v;
  return params;
}

bool same_series(const MultiSeries& a, const MultiSeries& b) {
  const VarSet vars = varset_union(a.vars(), b.vars());
  return (a.with_vars(vars) - b.with_vars(vars)).is_zero();
}

bool same_scalar(const NovikovScalar& a, const NovikovScalar& b) { return (a - b).is_zero(); }

/// Appends "name: got X, expected Y" to `mismatch` when the series differ.
void compare_series(const std::string& name, const MultiSeries& got, const MultiSeries& want, std::string& mismatch) {
  if (same_series(got, want)) return;
  if (!mismatch.empty()) mismatch += "; ";
  mismatch += name + " = " + got.str() + ", expected " + want.str();
}

struct Outcome {
  bool passed = false;
  std::string detail;
  Json report;
};

Outcome run_potential_match(const CheckContext& cx) {
  const Atlas atlas = cx.atlas();
  const Transition t = atlas.step(cx.string_field("transition"));
  const PotentialReport r = check_potential_match(atlas, t);
  Outcome o{r.ok == cx.field("expect").get<bool>(), "residual " + r.residual.str(), to_json(r)};
  if (cx.check.contains("residual")) {
    const MultiSeries want = parse_series(cx.check["residual"].get<std::string>(), t.source_vars, cx.atlas_params());
    if (!same_series(r.residual, want)) {
      o.passed = false;
      o.detail += ", expected " + want.str();
    }
  }
  return o;
}

Transition compose_steps(const Atlas& atlas, const std::vector<std::string>& steps) {
  if (steps.empty()) throw Error(ErrorKind::InvalidArgument, "empty chain of steps");
  Transition t = atlas.step(steps.front());
  for (std::size_t i = 1; i < steps.size(); ++i) t = compose(t, atlas.step(steps[i]));
  return t;
}

Outcome run_compose(const CheckContext& cx) {
  const Atlas atlas = cx.atlas();
  const Transition t = compose_steps(atlas, cx.string_list("steps"));
  const Parameters params = cx.atlas_params();
  std::string mismatch;
  Json map = Json::object();
  for (const auto& [v, s] : t.map) map[v] = s.str();
  for (const auto& [v, text] : cx.field("expect").items()) {
    auto it = t.map.find(v);
    if (it == t.map.end()) {
      mismatch += (mismatch.empty() ? "" : "; ") + v + " is not a target variable";
      continue;
    }
    compare_series(v, it->second, parse_series(text.get<std::string>(), t.source_vars, params), mismatch);
  }
  std::string shown;
  for (const auto& [v, s] : t.map) shown += (shown.empty() ? "" : ", ") + v + " = " + s.str();
  return {mismatch.empty(), mismatch.empty() ? shown : mismatch, Json{{"id", t.id}, {"map", map}}};
}

Outcome run_cocycle(const CheckContext& cx) {
  const Atlas atlas = cx.atlas();
  std::vector<std::string> loop;
  const Json& l = cx.field("loop");
  if (l.is_number_integer()) {
    const auto i = l.get<std::size_t>();
    if (i >= atlas.loops.size()) throw Error(ErrorKind::InvalidArgument, "no loop " + std::to_string(i));
    loop = atlas.loops[i];
  } else {
    loop = l.get<std::vector<std::string>>();
  }
  const CocycleReport r = verify_cocycle(atlas, loop);
  std::string detail = std::string(to_string(r.status));
  for (const auto& [v, s] : r.residuals)
    if (!s.is_zero()) detail += ", residual " + v + ": " + s.str();
  return {std::string(to_string(r.status)) == cx.string_field("expect"), detail, to_json(r)};
}

Outcome run_chain_feasible(const CheckContext& cx) {
  const Atlas atlas = cx.atlas();
  const bool honest = cx.check.value("honest", true);
  const ChainConstraints cc = chain_constraints(atlas, cx.string_list("steps"), honest);
  const FeasibilityResult f = feasible(cc.domain);
  Json report = to_json(f);
  report["approximate"] = cc.approximate;
  return {f.feasible == cx.field("expect").get<bool>(), f.feasible ? "feasible" : "infeasible", report};
}

Outcome run_feasible(const CheckContext& cx) {
  const Domain d = cx.bundle.constraints_with(cx.string_field("constraints"), cx.overrides);
  const FeasibilityResult f = feasible(d);
  const Json& e = cx.field("expect");
  bool ok = f.feasible == e.at("feasible").get<bool>();
  std::string detail = f.feasible ? "feasible" : "infeasible";
  if (!f.feasible && !f.certificates.empty()) {
    detail += ", certificate:";
    for (const auto& c : f.certificates.front()) detail += " [" + c.str() + "]";
    if (e.contains("certificate_size"))
      ok = ok && f.certificates.front().size() == e["certificate_size"].get<std::size_t>();
  }
  return {ok, detail, to_json(f)};
}

Outcome run_mc_classify(const CheckContext& cx) {
  const std::string key = cx.string_field("discs");
  DiscData data = cx.discs(key);
  if (cx.check.contains("drop")) {
    auto drop = cx.check["drop"].get<std::vector<std::size_t>>();
    std::sort(drop.rbegin(), drop.rend());
    for (auto i : drop) {
      if (i >= data.contributions.size()) throw Error(ErrorKind::InvalidArgument, "no contribution " + std::to_string(i));
      data.contributions.erase(data.contributions.begin() + static_cast<std::ptrdiff_t>(i));
    }
  }
  if (cx.check.contains("commutative")) data.deformation.commutative = cx.check["commutative"].get<bool>();
  const ObstructionReport r = classify_obstruction(data, m0_deformed(data, cx.cutoffs()));
  const Json& e = cx.field("expect");
  bool ok = std::string(to_string(r.kind)) == e.at("classification").get<std::string>();
  std::string detail = std::string(to_string(r.kind));
  if (r.kind == Obstruction::Weakly) detail += ", W = " + r.potential.str();
  for (const auto& [g, s] : r.residue) detail += ", " + g + ": " + s.str();
  if (ok && e.contains("potential")) {
    const VarSet vars = data.variables();
    const MultiSeries want = parse_series(e["potential"].get<std::string>(), vars, cx.disc_params(key));
    ok = r.potential.is_commutative() && same_series(r.potential.commutative_image(vars), want);
  }
  return {ok, detail, to_json(r)};
}

std::map<std::string, MultiSeries> commutative_outputs(const DiscData& data, const Outputs& outs) {
  std::map<std::string, MultiSeries> out;
  const VarSet vars = data.variables();
  for (const auto& [g, s] : outs) out.emplace(g, s.commutative_image(vars));
  return out;
}

Outcome run_m1(const CheckContext& cx) {
  const std::string key = cx.string_field("discs");
  const DiscData data = cx.discs(key);
  const Outputs outs = m1_between(data, cx.string_field("source"), cx.cutoffs());
  const auto images = commutative_outputs(data, outs);
  const Parameters params = cx.disc_params(key);
  std::string mismatch, shown;
  for (const auto& [g, s] : images)
    if (!s.is_zero()) shown += (shown.empty() ? "" : ", ") + g + " -> " + s.str();
  for (const auto& [g, text] : cx.field("expect").items()) {
    auto it = images.find(g);
    if (it == images.end()) {
      mismatch += (mismatch.empty() ? "" : "; ") + g + " is not a generator";
      continue;
    }
    compare_series(g, it->second, parse_series(text.get<std::string>(), data.variables(), params), mismatch);
  }
  return {mismatch.empty(), mismatch.empty() ? shown : mismatch, to_json(outs)};
}

Outcome run_solve_cocycle(const CheckContext& cx) {
  const std::string key = cx.string_field("discs");
  const DiscData data = cx.discs(key);
  std::map<std::string, MultiSeries> eqs;
  for (const auto& src : cx.string_list("sources"))
    for (const auto& [g, s] : commutative_outputs(data, m1_between(data, src, cx.cutoffs())))
      if (!s.is_zero()) eqs.emplace(src + "->" + g, s);
  const CocycleSolution sol = solve_cocycle(eqs, cx.string_list("unknowns"));
  const Parameters params = cx.disc_params(key);
  std::string mismatch, shown;
  for (const auto& [v, s] : sol.relations) shown += (shown.empty() ? "" : ", ") + v + " = " + s.str();
  for (const auto& [v, text] : cx.field("expect").items()) {
    auto it = std::find_if(sol.relations.begin(), sol.relations.end(), [&](const auto& r) { return r.first == v; });
    if (it == sol.relations.end()) {
      mismatch += (mismatch.empty() ? "" : "; ") + v + " was not solved";
      continue;
    }
    compare_series(v, it->second, parse_series(text.get<std::string>(), it->second.vars(), params), mismatch);
  }
  for (const auto& [g, s] : sol.residual)
    if (!s.is_zero()) mismatch += (mismatch.empty() ? "" : "; ") + g + " does not vanish: " + s.str();
  return {mismatch.empty(), mismatch.empty() ? shown : mismatch, to_json(sol)};
}

Outcome run_isomorphism(const CheckContext& cx) {
  const std::string fkey = cx.string_field("forward");
  const DiscData fwd = cx.discs(fkey);
  std::optional<DiscData> bwd;
  if (cx.check.contains("backward")) bwd = cx.discs(cx.string_field("backward"));
  const Parameters params = cx.disc_params(fkey);
  Relations rel;
  VarSet vars = fwd.variables();
  if (bwd) vars = varset_union(vars, bwd->variables());
  for (const auto& [v, text] : cx.field("relations").items())
    rel.emplace_back(v, parse_series(text.get<std::string>(), vars, params));
  const IsomorphismReport r =
      check_isomorphism_pair(fwd, cx.slots("forward_inputs"), bwd ? &*bwd : nullptr,
                             bwd ? cx.slots("backward_inputs") : std::vector<std::vector<std::string>>{}, rel,
                             cx.check.value("expected", ""), cx.cutoffs());
  auto describe = [](const CompositionCheck& c) {
    if (c.ok) return c.factor->str() + "*" + c.expected;
    return c.reason;
  };
  std::string detail = "forward: " + describe(r.forward);
  if (r.backward) detail += ", backward: " + describe(*r.backward);
  return {r.ok == cx.field("expect").get<bool>(), detail, to_json(r)};
}

Outcome run_critical_locus(const CheckContext& cx) {
  const Atlas atlas = cx.bundle.atlas_with(cx.overrides);
  const Chart& chart = atlas.chart(cx.string_field("chart"));
  CritConfig config;
  config.target_energy = cx.options.energy;
  const CriticalLocus locus = critical_locus(chart, config);
  const Parameters params = cx.atlas_params();
  const Json& e = cx.field("expect");
  std::string mismatch;
  auto count = [&](const char* key, std::size_t got) {
    if (e.contains(key) && e[key].get<std::size_t>() != got)
      mismatch += (mismatch.empty() ? "" : "; ") + std::string(key) + " = " + std::to_string(got) + ", expected " +
                  std::to_string(e[key].get<std::size_t>());
  };
  count("points", locus.points.size());
  count("excluded", locus.excluded.size());
  count("components", locus.components.size());
  if (e.contains("coordinates")) {
    for (const auto& want : e["coordinates"]) {
      const Point p = point_from_json(want, params, "/expect/coordinates");
      const bool found = std::any_of(locus.points.begin(), locus.points.end(), [&](const CriticalPoint& c) {
        if (c.coordinates.size() != p.size()) return false;
        for (const auto& [v, s] : p)
          if (!c.coordinates.count(v) || !same_scalar(c.coordinates.at(v), s)) return false;
        return true;
      });
      if (!found) mismatch += (mismatch.empty() ? "" : "; ") + std::string("no critical point at ") + want.dump();
    }
  }
  if (e.contains("values")) {
    for (const auto& want : e["values"]) {
      const NovikovScalar v = scalar_from_json(want, params, "/expect/values");
      const bool found = std::any_of(locus.points.begin(), locus.points.end(),
                                     [&](const CriticalPoint& c) { return same_scalar(c.value, v); });
      if (!found) mismatch += (mismatch.empty() ? "" : "; ") + std::string("no critical value ") + v.str();
    }
  }
  std::string shown = std::to_string(locus.points.size()) + " points, " + std::to_string(locus.excluded.size()) +
                      " excluded, " + std::to_string(locus.components.size()) + " components";
  for (const auto& p : locus.points) {
    shown += "; ";
    for (const auto& [v, s] : p.coordinates) shown += v + " = " + s.str() + " ";
    shown += "(W = " + p.value.str() + ")";
  }
  for (const auto& c : locus.components) shown += "; " + c.str();
  return {mismatch.empty(), mismatch.empty() ? shown : mismatch, to_json(locus)};
}

Outcome run_transport(const CheckContext& cx) {
  const Atlas atlas = cx.atlas();
  const Transition t = atlas.step(cx.string_field("transition"));
  const Parameters params = cx.atlas_params();
  const Point p = parse_point(cx.string_field("point"), params);
  const Json& e = cx.field("expect");
  const bool want_outside = e.is_string() && e.get<std::string>() == "outside_overlap";
  TransportResult r;
  try {
    r = transport_point(atlas, p, t);
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::OutsideOverlap) throw;
    return {want_outside, err.what(), Json{{"error", err.what()}}};
  }
  std::string shown;
  for (const auto& [v, s] : r.point) shown += (shown.empty() ? "" : ", ") + v + " = " + s.str();
  shown += r.honest ? " (honest)" : " (pseudo)";
  if (want_outside) return {false, "transported to " + shown, to_json(r)};
  std::string mismatch;
  for (const auto& [v, text] : e.items()) {
    auto it = r.point.find(v);
    const NovikovScalar want = parse_scalar(text.get<std::string>(), params);
    if (it == r.point.end() || !same_scalar(it->second, want))
      mismatch += (mismatch.empty() ? "" : "; ") + v + " expected " + want.str();
  }
  return {mismatch.empty(), mismatch.empty() ? shown : shown + "; " + mismatch, to_json(r)};
}

CheckResult run_check(const ModelBundle& bundle, const RunOptions& options, const Json& check, std::size_t index) {
  CheckResult out;
  out.name = check.value("name", "check " + std::to_string(index));
  out.kind = check.value("kind", "");
  try {
    CheckContext cx{bundle, options, check, check_overrides(bundle, check)};
    Outcome o;
    if (out.kind == "potential_match") o = run_potential_match(cx);
    else if (out.kind == "compose") o = run_compose(cx);
    else if (out.kind == "cocycle") o = run_cocycle(cx);
    else if (out.kind == "chain_feasible") o = run_chain_feasible(cx);
    else if (out.kind == "feasible") o = run_feasible(cx);
    else if (out.kind == "mc_classify") o = run_mc_classify(cx);
    else if (out.kind == "m1") o = run_m1(cx);
    else if (out.kind == "solve_cocycle") o = run_solve_cocycle(cx);
    else if (out.kind == "isomorphism") o = run_isomorphism(cx);
    else if (out.kind == "critical_locus") o = run_critical_locus(cx);
    else if (out.kind == "transport") o = run_transport(cx);
    else throw Error(ErrorKind::InvalidArgument, "unknown check kind '" + out.kind + "'");
    out.passed = o.passed;
    out.detail = std::move(o.detail);
    out.report = std::move(o.report);
  } catch (const Error& e) {
    out.passed = false;
    out.detail = e.what();
    out.report = Json{{"error", e.what()}};
  } catch (const std::exception& e) {
    out.passed = false;
    out.detail = std::string("InvalidArgument: ") + e.what();
    out.report = Json{{"error", out.detail}};
  }
  return out;
}

}  // namespace

ManifestReport run_manifest(const ModelBundle& bundle, const RunOptions& options) {
  ManifestReport report;
  report.model = bundle.name;
  const Json& checks = bundle.manifest.at("checks");
  if (options.parallel) {
    std::vector<std::future<CheckResult>> futures;
    for (std::size_t i = 0; i < checks.size(); ++i)
      futures.push_back(std::async(std::launch::async, [&, i] { return run_check(bundle, options, checks[i], i); }));
    for (auto& f : futures) report.checks.push_back(f.get());
  } else {
    for (std::size_t i = 0; i < checks.size(); ++i) report.checks.push_back(run_check(bundle, options, checks[i], i));
  }
  return report;
}

Json to_json(const ManifestReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"kind", c.kind}, {"passed", c.passed}, {"detail", c.detail}, {"report", c.report}});
  return Json{{"model", r.model}, {"passed", r.passed()}, {"checks", checks}};
}

}  // namespace novikit
