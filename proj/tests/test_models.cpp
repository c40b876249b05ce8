#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "novikit/error.hpp"
#include "novikit/models.hpp"

using namespace novikit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_copy(const std::string& model, const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("novikit-test-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(fs::path(model_directory()) / model))
    fs::copy_file(entry.path(), dir / entry.path().filename());
  return dir;
}

ErrorKind load_error(const std::string& dir) {
  try {
    load_model_dir(dir);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("bundled models are listed and load") {
  CHECK(model_names() == std::vector<std::string>{"p1", "pants", "four-punctured", "paradox", "three-pants", "wall-crossing"});
  for (const auto& name : model_names()) {
    ModelBundle m = load_model(name);
    CHECK(m.name == name);
    CHECK_FALSE(m.description.empty());
  }
}

TEST_CASE("every bundled model round-trips through serialization") {
  for (const auto& name : model_names()) {
    ModelBundle m = load_model(name);
    INFO(name);
    if (m.atlas) {
      Json once = to_json(*m.atlas);
      Atlas back = atlas_from_json(once);
      CHECK(to_json(back).dump() == once.dump());
      for (std::size_t i = 0; i < back.charts.size(); ++i) CHECK(back.charts[i].potential == m.atlas->charts[i].potential);
      for (std::size_t i = 0; i < back.transitions.size(); ++i)
        for (const auto& [v, s] : m.atlas->transitions[i].map) CHECK(back.transitions[i].map.at(v) == s);
    }
    for (const auto& [key, d] : m.discs) {
      Json once = to_json(d);
      CHECK(to_json(disc_data_from_json(once)).dump() == once.dump());
    }
  }
}

TEST_CASE("every manifest check passes with default cutoffs") {
  for (const auto& name : model_names()) {
    ManifestReport r = run_manifest(load_model(name));
    for (const auto& c : r.checks) {
      INFO(name << ": " << c.name << ": " << c.detail);
      CHECK(c.passed);
    }
    CHECK(r.passed());
    CHECK_FALSE(r.checks.empty());
  }
}

TEST_CASE("parallel and sequential runs agree") {
  for (const auto& name : model_names()) {
    ModelBundle m = load_model(name);
    RunOptions seq;
    seq.parallel = false;
    CHECK(to_json(run_manifest(m)).dump() == to_json(run_manifest(m, seq)).dump());
  }
}

TEST_CASE("area criterion in the paradox model") {
  ModelBundle m = load_model("paradox");
  CHECK(feasible(m.constraints_with("criterion", m.parameter_sets.at("feasible"))).feasible);
  FeasibilityResult bad = feasible(m.constraints_with("criterion", m.parameter_sets.at("infeasible")));
  CHECK_FALSE(bad.feasible);
  FeasibilityResult regions = feasible(m.constraints_with("regions", {}));
  CHECK_FALSE(regions.feasible);
  CHECK(regions.certificates.at(0).size() == 2);
}

TEST_CASE("overrides reach every check") {
  ModelBundle m = load_model("p1", {{"A_S", Rational(2)}});
  ManifestReport r = run_manifest(m);
  CHECK_FALSE(r.passed());
}

TEST_CASE("unknown models") {
  try {
    load_model("no-such-model");
    FAIL("expected UnknownModel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownModel);
  }
}

TEST_CASE("corrupted model files name the file and position") {
  fs::path dir = scratch_copy("wall-crossing", "corrupt");
  {
    std::ofstream out(dir / "atlas.json", std::ios::trunc);
    out << "{\n  \"charts\": [\n    {\"name\": \"L\",, }\n  ]\n}\n";
  }
  try {
    load_model_dir(dir.string());
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(e.detail().find("atlas.json:3:") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("semantic errors in model files") {
  fs::path dir = scratch_copy("wall-crossing", "semantic");
  {
    std::ifstream in(dir / "atlas.json");
    Json j = Json::parse(in);
    j["transitions"][1]["dst"] = "nowhere";
    std::ofstream out(dir / "atlas.json", std::ios::trunc);
    out << j.dump(2);
  }
  try {
    load_model_dir(dir.string());
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(e.detail().find("/transitions/1") != std::string::npos);
    CHECK(e.detail().find("nowhere") != std::string::npos);
  }
  fs::remove_all(dir);

  fs::path missing = scratch_copy("p1", "missing");
  fs::remove(missing / "strips.json");
  CHECK(load_error(missing.string()) == ErrorKind::ParseError);
  fs::remove_all(missing);
}

TEST_CASE("model directory from the environment") {
  fs::path dir = fs::temp_directory_path() / ("novikit-test-env-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::copy(fs::path(model_directory()) / "p1", dir / "p1");
  std::string previous = model_directory();
  ::setenv("NOVIKIT_MODEL_DIR", dir.c_str(), 1);
  CHECK(model_directory() == dir.string());
  CHECK(load_model("p1").directory.find(dir.string()) == 0);
  ::unsetenv("NOVIKIT_MODEL_DIR");
  CHECK(model_directory() == previous);
  fs::remove_all(dir);
}

TEST_CASE("constraint files") {
  Json blank = Json::parse("null");
  CHECK(feasible(constraint_file_from_json(blank)).feasible);
  Json bare = Json::parse(R"(["val(x) > 0", "val(x) < 1"])");
  CHECK(feasible(constraint_file_from_json(bare)).feasible);
  Json with_params = Json::parse(R"({"parameters": {"A": "2"}, "constraints": ["val(x) > A", "val(x) < 1"]})");
  CHECK_FALSE(feasible(constraint_file_from_json(with_params)).feasible);
  CHECK(feasible(constraint_file_from_json(with_params, {{"A", Rational(0)}})).feasible);
}
