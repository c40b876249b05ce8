#include "novikit/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "novikit/error.hpp"
#include "novikit/models.hpp"

namespace novikit {

namespace {

struct RunConfig {
  std::string energy_text;
  long degree = 8;
  std::string format = "text";
  std::string model;
  std::vector<std::string> params;

  ExtRational energy = Rational(5);
  Parameters overrides;
};


bool is_input_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::UnknownModel:
    case ErrorKind::UnknownChart:
    case ErrorKind::UnknownTransition:
    case ErrorKind::InvalidArgument:
    case ErrorKind::VariableMismatch:
      return true;
    default:
      return false;
  }
}

void finalize(RunConfig& cfg) {
  if (cfg.energy_text.empty()) {
    if (const char* env = std::getenv("NOVIKIT_ENERGY"); env && *env) cfg.energy_text = env;
  }
  if (!cfg.energy_text.empty()) {
    if (cfg.energy_text == "inf") {
      cfg.energy = ExtRational::infinity();
    } else {
      const Rational e = parse_rational_expr(cfg.energy_text);
      if (e.sign() <= 0) throw Error(ErrorKind::InvalidArgument, "--energy must be positive");
      cfg.energy = e;
    }
  }
  if (cfg.degree <= 0) throw Error(ErrorKind::InvalidArgument, "--degree must be positive");
  for (const auto& p : cfg.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorKind::InvalidArgument, "--param expects NAME=VALUE, got '" + p + "'");
    cfg.overrides[p.substr(0, eq)] = parse_rational_expr(p.substr(eq + 1), cfg.overrides);
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// The atlas from a file argument or the bundled model, truncated to the
/// cutoffs unless `exact`.
Atlas load_atlas(const RunConfig& cfg, const std::string& path, bool exact = false) {
  Atlas atlas;
  if (!path.empty()) {
    atlas = atlas_from_json(read_json_file(path), cfg.overrides);
  } else if (!cfg.model.empty()) {
    atlas = load_model(cfg.model, cfg.overrides).atlas_with(cfg.overrides);
  } else {
    throw Error(ErrorKind::InvalidArgument, "give an atlas file or --model");
  }
  return exact ? atlas : atlas.with_cutoffs(cfg.energy, cfg.degree);
}

/// Picks the named member of a model section, or its only member.
template <class Map>
std::string pick_key(const Map& docs, const std::string& key, const std::string& what, const std::string& model) {
  if (!key.empty()) {
    if (!docs.count(key)) throw Error(ErrorKind::InvalidArgument, "model '" + model + "' has no " + what + " '" + key + "'");
    return key;
  }
  if (docs.size() == 1) return docs.begin()->first;
  std::string keys;
  for (const auto& [k, v] : docs) keys += (keys.empty() ? "" : ", ") + k;
  throw Error(ErrorKind::InvalidArgument, "model '" + model + "' has " + what + " files {" + keys + "}; choose one");
}

void emit(std::ostream& out, const RunConfig& cfg, const Json& j, const std::string& text) {
  if (cfg.format == "json") out << j.dump(2) << "\n";
  else out << text;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_validate(const RunConfig& cfg, const std::string& path, std::ostream& out) {
  const Atlas atlas = load_atlas(cfg, path);
  bool ok = true;
  Json transitions = Json::array();
  std::string text;
  for (const auto& t : atlas.transitions) {
    Json entry{{"id", t.id}};
    try {
      const PotentialReport r = check_potential_match(atlas, t);
      ok = ok && r.ok;
      entry["ok"] = r.ok;
      entry["residual"] = r.residual.str();
      text += std::string(r.ok ? "ok    " : "FAIL  ") + "potential " + t.id + " (" + t.source + " -> " + t.target +
              "): residual " + r.residual.str() + "\n";
    } catch (const Error& e) {
      if (is_input_error(e.kind())) throw;
      ok = false;
      entry["ok"] = false;
      entry["error"] = e.what();
      text += "FAIL  potential " + t.id + ": " + e.what() + "\n";
    }
    transitions.push_back(entry);
  }
  Json loops = Json::array();
  for (std::size_t i = 0; i < atlas.loops.size(); ++i) {
    std::string name;
    for (const auto& s : atlas.loops[i]) name += (name.empty() ? "" : ", ") + s;
    try {
      const CocycleReport r = verify_cocycle(atlas, atlas.loops[i]);
      const bool pass = r.status != CocycleStatus::Failed;
      ok = ok && pass;
      Json entry = to_json(r);
      entry["loop"] = atlas.loops[i];
      loops.push_back(entry);
      text += std::string(pass ? "ok    " : "FAIL  ") + "cocycle [" + name + "]: " + std::string(to_string(r.status));
      for (const auto& [v, s] : r.residuals)
        if (!s.is_zero()) text += "; residual " + v + ": " + s.str();
      if (r.status == CocycleStatus::Ok && !r.honest_feasibility.feasible) text += " (pseudo points only)";
      text += "\n";
    } catch (const Error& e) {
      if (is_input_error(e.kind())) throw;
      ok = false;
      loops.push_back(Json{{"loop", atlas.loops[i]}, {"error", e.what()}});
      text += "FAIL  cocycle [" + name + "]: " + e.what() + "\n";
    }
  }
  text += ok ? "all checks passed\n" : "some checks failed\n";
  emit(out, cfg, Json{{"passed", ok}, {"transitions", transitions}, {"loops", loops}}, text);
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_critical(const RunConfig& cfg, const std::string& path, std::string chart_name, std::ostream& out) {
  // The energy cutoff is the lifting target; truncating the potential first
  // would hide exact roots.
  const Atlas atlas = load_atlas(cfg, path, true);
  if (chart_name.empty()) {
    if (atlas.charts.size() != 1) throw Error(ErrorKind::InvalidArgument, "the atlas has several charts; give --chart");
    chart_name = atlas.charts.front().name;
  }
  const Chart& chart = atlas.chart(chart_name);
  CritConfig config;
  config.target_energy = cfg.energy;
  const CriticalLocus locus = critical_locus(chart, config);
  std::ostringstream text;
  text << "chart " << chart.name << ": W = " << chart.potential.str() << "\n";
  text << locus.points.size() << " critical point(s), " << locus.components.size() << " component(s), "
       << locus.excluded.size() << " excluded point(s)\n";
  for (const auto& p : locus.points) {
    text << "  point";
    for (const auto& [v, s] : p.coordinates) text << " " << v << " = " << s.str();
    text << "; W = " << p.value.str();
    text << (p.lifted_to.is_finite() ? "; exact below T^" + p.lifted_to.str() : std::string("; exact")) << "\n";
  }
  for (const auto& c : locus.components) text << "  component " << c.str() << "\n";
  for (const auto& p : locus.excluded) {
    text << "  outside the chart:";
    for (const auto& [v, s] : p.coordinates) text << " " << v << " = " << s.str();
    text << "\n";
  }
  for (const auto& c : locus.excluded_components) text << "  component outside the chart: " << c.str() << "\n";
  for (const auto& d : locus.degenerate)
    text << "  degenerate root ~ " << d.coefficient.str() << "*T^" << d.exponent.str() << " (multiplicity "
         << d.multiplicity << ")\n";
  for (const auto& u : locus.unresolved) text << "  unresolved roots: " << u.str() << "\n";
  Json j = to_json(locus);
  j["chart"] = chart.name;
  emit(out, cfg, j, text.str());
  return kExitPass;
}

int cmd_mc_check(const RunConfig& cfg, const std::string& path, const std::string& key, std::ostream& out) {
  DiscData data;
  if (!path.empty()) {
    data = disc_data_from_json(read_json_file(path), cfg.overrides);
  } else if (!cfg.model.empty()) {
    const ModelBundle b = load_model(cfg.model, cfg.overrides);
    data = b.discs_with(pick_key(b.disc_docs, key, "disc data", b.name), cfg.overrides);
  } else {
    throw Error(ErrorKind::InvalidArgument, "give a disc-data file or --model");
  }
  const ObstructionReport r = classify_obstruction(data, m0_deformed(data, Cutoffs{cfg.energy, cfg.degree}));
  std::string text = std::string(to_string(r.kind));
  if (r.kind == Obstruction::Weakly) text += "\nW = " + r.potential.str() + "  (coefficient of " + r.unit + ")";
  for (const auto& [g, s] : r.residue) text += "\n" + g + ": " + s.str();
  emit(out, cfg, to_json(r), text + "\n");
  return r.kind == Obstruction::Obstructed ? kExitCheckFailed : kExitPass;
}

int cmd_transport(const RunConfig& cfg, const std::string& path, const std::string& step, const std::string& point,
                  std::ostream& out) {
  const Atlas atlas = load_atlas(cfg, path);
  if (step.empty()) throw Error(ErrorKind::InvalidArgument, "give --transition");
  const Transition t = atlas.step(step);
  const Point p = parse_point(point, cfg.overrides);
  try {
    const TransportResult r = transport_point(atlas, p, t);
    std::string text;
    for (const auto& [v, s] : r.point) text += v + " = " + s.str() + "\n";
    text += r.honest ? "regime: honest\n" : "regime: pseudo\n";
    emit(out, cfg, to_json(r), text);
    return kExitPass;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::OutsideOverlap) throw;
    emit(out, cfg, Json{{"error", "OutsideOverlap"}, {"detail", e.detail()}}, std::string(e.what()) + "\n");
    return kExitCheckFailed;
  }
}

int cmd_feasible(const RunConfig& cfg, const std::string& path, const std::string& key, std::ostream& out) {
  Domain d;
  if (!path.empty()) {
    const std::string text = read_text(path);
    const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
    d = blank ? Domain::all() : constraint_file_from_json(parse_json_text(text, path), cfg.overrides);
  } else if (!cfg.model.empty()) {
    const ModelBundle b = load_model(cfg.model, cfg.overrides);
    d = b.constraints_with(pick_key(b.constraint_docs, key, "constraint", b.name), cfg.overrides);
  } else {
    throw Error(ErrorKind::InvalidArgument, "give a constraint file or --model");
  }
  const FeasibilityResult f = feasible(d);
  std::string text;
  if (f.feasible) {
    text = "feasible\n";
    if (!f.witness.empty()) {
      text += "witness:";
      for (const auto& [v, x] : f.witness) text += " val(" + v + ") = " + x.str();
      text += "\n";
    }
  } else {
    text = "infeasible\n";
    for (std::size_t i = 0; i < f.certificates.size(); ++i) {
      text += f.certificates.size() > 1 ? "certificate for clause " + std::to_string(i) + ":\n" : "certificate:\n";
      for (const auto& c : f.certificates[i]) text += "  " + c.str() + "\n";
    }
  }
  emit(out, cfg, to_json(f), text);
  return f.feasible ? kExitPass : kExitCheckFailed;
}

int cmd_run(const RunConfig& cfg, bool sequential, std::ostream& out) {
  std::vector<std::string> names;
  if (cfg.model.empty() || cfg.model == "all") names = model_names();
  else names.push_back(cfg.model);
  RunOptions options;
  options.energy = cfg.energy;
  options.degree = cfg.degree;
  options.parallel = !sequential;
  bool ok = true;
  Json reports = Json::array();
  std::string text;
  for (const auto& name : names) {
    const ManifestReport r = run_manifest(load_model(name, cfg.overrides), options);
    ok = ok && r.passed();
    reports.push_back(to_json(r));
    std::size_t passed = 0;
    for (const auto& c : r.checks) passed += c.passed;
    text += name + ": " + std::to_string(passed) + "/" + std::to_string(r.checks.size()) + " checks passed\n";
    for (const auto& c : r.checks)
      text += std::string(c.passed ? "  ok    " : "  FAIL  ") + c.name + " [" + c.kind + "]: " + c.detail + "\n";
  }
  emit(out, cfg, names.size() == 1 ? reports.front() : Json{{"passed", ok}, {"models", reports}}, text);
  return ok ? kExitPass : kExitCheckFailed;
}

int cmd_models(const RunConfig& cfg, std::ostream& out) {
  Json list = Json::array();
  std::string text;
  for (const auto& name : model_names()) {
    const ModelBundle b = load_model(name);
    Json entry{{"name", name}, {"description", b.description}, {"checks", b.manifest["checks"].size()}};
    Json charts = Json::array();
    if (b.atlas)
      for (const auto& c : b.atlas->charts) charts.push_back(c.name);
    entry["charts"] = charts;
    Json discs = Json::array();
    for (const auto& [k, v] : b.disc_docs) discs.push_back(k);
    entry["discs"] = discs;
    list.push_back(entry);
    text += name + ": " + b.description + "\n";
  }
  emit(out, cfg, list, text);
  return kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const char* env = std::getenv("NOVIKIT_DEGREE"); env && *env) {
    try {
      cfg.degree = std::stol(env);
    } catch (const std::exception&) {
      err << "InvalidArgument: NOVIKIT_DEGREE must be an integer\n";
      return kExitInputError;
    }
  }

  CLI::App app{"Exact computations for Novikov-ring deformation spaces", "novikit"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--energy", cfg.energy_text, "Energy cutoff, a positive rational or inf (default 5, env NOVIKIT_ENERGY)");
  app.add_option("--degree", cfg.degree, "Degree cutoff for series (default 8, env NOVIKIT_DEGREE)");
  app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--model", cfg.model, "Bundled model to use instead of an input file");
  app.add_option("--param", cfg.params, "Override a parameter, NAME=VALUE (repeatable)");

  std::string path, chart, transition, point, discs_key, constraints_key;
  bool sequential = false;

  auto* validate = app.add_subcommand("validate", "Check potential matching of every transition and every loop");
  validate->add_option("atlas", path, "Atlas JSON file");
  auto* critical = app.add_subcommand("critical", "Critical locus of a chart potential");
  critical->add_option("atlas", path, "Atlas JSON file");
  critical->add_option("--chart", chart, "Chart name");
  auto* mc = app.add_subcommand("mc-check", "Classify the Maurer-Cartan obstruction of disc data");
  mc->add_option("file", path, "Disc-data JSON file");
  mc->add_option("--discs", discs_key, "Disc data of the model");
  auto* transport = app.add_subcommand("transport", "Transport a point through a transition");
  transport->add_option("atlas", path, "Atlas JSON file");
  transport->add_option("--transition", transition, "Transition id, id^-1 or identity:CHART");
  transport->add_option("--point", point, "Point, e.g. \"u = T^(1/2), v = T^(1/2)\"")->required();
  auto* feas = app.add_subcommand("feasible", "Feasibility of valuation constraints");
  feas->add_option("file", path, "Constraint JSON file");
  feas->add_option("--constraints", constraints_key, "Constraint file of the model");
  auto* run = app.add_subcommand("run", "Run the manifest checks of a model (all models by default)");
  run->add_flag("--sequential", sequential, "Run checks one at a time");
  auto* models = app.add_subcommand("models", "List the bundled models");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInputError;
  }

  try {
    finalize(cfg);
    if (validate->parsed()) return cmd_validate(cfg, path, out);
    if (critical->parsed()) return cmd_critical(cfg, path, chart, out);
    if (mc->parsed()) return cmd_mc_check(cfg, path, discs_key, out);
    if (transport->parsed()) return cmd_transport(cfg, path, transition, point, out);
    if (feas->parsed()) return cmd_feasible(cfg, path, constraints_key, out);
    if (run->parsed()) return cmd_run(cfg, sequential, out);
    if (models->parsed()) return cmd_models(cfg, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return is_input_error(e.kind()) ? kExitInputError : kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "InvalidArgument: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace novikit
