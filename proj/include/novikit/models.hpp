#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "novikit/serialize.hpp"

namespace novikit {

// A model is a directory holding manifest.json and the files it names:
//
//   {"name": "p1", "description": "...",
//    "atlas": "atlas.json",
//    "discs": {"strips": "strips.json"},
//    "constraints": {"regions": "regions.json"},
//    "parameter_sets": {"large": {"A_S": "2"}},
//    "checks": [{"name": "...", "kind": "critical_locus", "chart": "fiber",
//                "parameters": "large" | {"A_S": "2"}, "expect": ...}]}
//
// Check kinds and their fields:
//   potential_match  transition, expect: bool, residual?: series text
//   compose          steps: [step], expect: {var: series text}
//   cocycle          loop: index or [step], expect: "ok" | "failed" | "empty_overlap"
//   chain_feasible   steps: [step], honest: bool, expect: bool
//   feasible         constraints: key, expect: {feasible: bool, certificate_size?: n}
//   mc_classify      discs, drop?: [index], commutative?: bool,
//                    expect: {classification, potential?: series text}
//   m1               discs, source, expect: {generator: series text}
//   solve_cocycle    discs, sources: [generator], unknowns: [var], expect: {var: series text}
//   isomorphism      forward, forward_inputs, backward?, backward_inputs?, expected?,
//                    relations: {var: series text}, expect: bool
//   critical_locus   chart, expect: {points?, excluded?, components?,
//                    coordinates?: [{var: scalar text}], values?: [scalar text]}
//   transport        transition, point: point text, expect: {var: scalar text} | "outside_overlap"
//
// A constraint file is a domain, or {"parameters": {...}, "constraints": domain}.

/// Directory holding the bundled models: $NOVIKIT_MODEL_DIR when set,
/// otherwise the models/ directory of the source tree.
std::string model_directory();
/// Names of the bundled models.
const std::vector<std::string>& model_names();

struct ModelBundle {
  std::string name;
  std::string description;
  std::string directory;
  Json manifest;
  std::optional<Json> atlas_doc;
  std::map<std::string, Json> disc_docs;
  std::map<std::string, Json> constraint_docs;
  std::map<std::string, Parameters> parameter_sets;
  /// Applied on top of every parameter set.
  Parameters overrides;

  /// The atlas under the default parameters and the overrides.
  std::optional<Atlas> atlas;
  std::map<std::string, DiscData> discs;

  Atlas atlas_with(const Parameters& params) const;
  DiscData discs_with(const std::string& key, const Parameters& params) const;
  Domain constraints_with(const std::string& key, const Parameters& params) const;
};

/// Loads a bundled model by name. Throws UnknownModel, or ParseError naming
/// the file and location.
ModelBundle load_model(const std::string& name, const Parameters& overrides = {});
/// Loads the model stored in `directory`.
ModelBundle load_model_dir(const std::string& directory, const Parameters& overrides = {});

/// Parses a constraint file (see above); null means no constraints.
Domain constraint_file_from_json(const Json& j, const Parameters& overrides = {});

struct RunOptions {
  ExtRational energy = Rational(5);
  DegreeCutoff degree = 8;
  bool parallel = true;
};

struct CheckResult {
  std::string name;
  std::string kind;
  bool passed = false;
  std::string detail;
  Json report;
};

struct ManifestReport {
  std::string model;
  std::vector<CheckResult> checks;
  bool passed() const;
};

/// Runs every check of the manifest and compares it with the expectation.
/// A failing or throwing check is recorded and the run continues.
ManifestReport run_manifest(const ModelBundle& bundle, const RunOptions& options = {});

Json to_json(const ManifestReport& r);

}  // namespace novikit
