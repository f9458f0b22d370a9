#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qual/config.hpp"
#include "qual/csv.hpp"
#include "qual/errors.hpp"
#include "qual/pipeline.hpp"
#include "qual/synth.hpp"

using namespace qual;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qualtest_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void writeFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string readFile(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// small synthetic table + config for a full pipeline run
PipelineConfig smallConfig(const TempDir& dir, int threads = 1) {
  const Dataset synth = generateSynthetic(160, 5, 0.01, 4);
  saveTableFile(synth, dir.path / "input.csv");

  PipelineConfig config = defaultPipelineConfig();
  config.name = "smoke";
  config.input = dir.path / "input.csv";
  config.schema.defaultRole = Role::Input;
  config.schema.roles["Textile quality score"] = Role::Response;
  config.seed = 12;
  config.screeningK = 5;
  config.screeningTrees = 40;
  config.forest.nTrees = 30;
  config.boosting.nTrees = 60;
  config.voteM = 4;
  config.finalCount = 3;
  config.outDir = dir.path / "out";
  config.nThreads = threads;
  config.designResponses = std::string(QUAL_DATA_DIR) + "/ccf_design.csv";
  return config;
}

}  // namespace

TEST_CASE("config files load with defaults and strict keys") {
  TempDir dir("config");
  writeFile(dir.path / "input.csv", "a,b,y\n1,2,3\n");
  writeFile(dir.path / "config.json", R"({
    "input": "input.csv",
    "schema": {"default_role": "input", "roles": {"y": "response"}},
    "seed": 7,
    "screening": {"k": 2, "trees": 25},
    "boosting": {"stages": 40, "learn_rate": 0.2},
    "vote": {"m": 2},
    "final_count": 2,
    "out": "results"
  })");
  const PipelineConfig config =
      loadPipelineConfig(dir.path / "config.json");
  CHECK(config.input == dir.path / "input.csv");
  CHECK(config.seed == 7);
  CHECK(config.screeningK == 2);
  CHECK(config.screeningTrees == 25);
  CHECK(config.boosting.nTrees == 40);
  CHECK(config.boosting.learnRate == 0.2);
  CHECK(config.boosting.maxLeafNodes == 2);   // default kept
  CHECK(config.forest.nTrees == 100);         // default kept
  CHECK(config.voteM == 2);
  CHECK(config.finalCount == 2);
  CHECK(config.outDir == dir.path / "results");
  CHECK(config.schema.roles.at("y") == Role::Response);
}

TEST_CASE("config rejects unknown keys and missing input") {
  TempDir dir("badconfig");
  writeFile(dir.path / "typo.json", R"({"input": "x.csv", "screning": {}})");
  CHECK_THROWS_AS(loadPipelineConfig(dir.path / "typo.json"), ConfigError);
  writeFile(dir.path / "noinput.json", R"({"seed": 1})");
  CHECK_THROWS_AS(loadPipelineConfig(dir.path / "noinput.json"), ConfigError);
  writeFile(dir.path / "notjson.json", "not json at all");
  CHECK_THROWS_AS(loadPipelineConfig(dir.path / "notjson.json"), ConfigError);
  CHECK_THROWS_AS(loadPipelineConfig(dir.path / "absent.json"), ConfigError);
}

TEST_CASE("the bundled example config parses") {
  const fs::path configs =
      fs::path(QUAL_DATA_DIR).parent_path() / "configs";
  const PipelineConfig config =
      loadPipelineConfig(configs / "synthetic_pipeline.json");
  CHECK(config.screeningK == 16);
  CHECK(config.boosting.nTrees == 500);
  CHECK(config.boosting.maxLeafNodes == 2);
  CHECK(config.finalCount == 3);
  CHECK(config.designResponses.has_value());
}

TEST_CASE("config digest is stable and sensitive to content") {
  TempDir dir("digest");
  PipelineConfig a = smallConfig(dir);
  PipelineConfig b = smallConfig(dir);
  CHECK(configDigest(a) == configDigest(b));
  b.seed += 1;
  CHECK(configDigest(a) != configDigest(b));
}

TEST_CASE("the full pipeline runs and writes a re-derivable report") {
  TempDir dir("pipeline");
  const PipelineConfig config = smallConfig(dir);
  const PipelineResult result = runPipeline(config);

  CHECK(result.screened.size() == 5);
  CHECK(result.voted.size() == 4);
  CHECK(result.finalFactors.size() == 3);
  CHECK(result.design.runs.size() == 17);
  REQUIRE(result.surface);
  CHECK(result.surface->residualDf == 5);

  CHECK(fs::exists(config.outDir / "report.json"));
  CHECK(fs::exists(config.outDir / "report.txt"));
  CHECK_FALSE(fs::exists(config.outDir / "FAILED"));

  const Json report = Json::parse(readFile(config.outDir / "report.json"));
  CHECK(report.at("report_version") == 1);
  CHECK(report.at("dataset").at("rows") == 160);
  CHECK(report.at("screening").at("selected").size() == 5);
  CHECK(report.at("models").contains("random_forest"));
  CHECK(report.at("models").contains("boosted_tree"));
  CHECK(report.at("models").contains("knn"));
  CHECK(report.at("models").contains("ols"));
  CHECK(report.at("vote").at("selection").size() == 4);
  CHECK(report.at("design").at("runs").size() == 17);
  CHECK(report.at("surface").at("effects").size() == 12);

  // the three signal variables dominate this easy task
  for (const auto& name :
       {"Pigment fastness", "Machine productivity", "Pile weight"}) {
    CHECK(std::find(result.screened.begin(), result.screened.end(), name) !=
          result.screened.end());
  }
}

TEST_CASE("pipeline reports are byte-identical across reruns and threads") {
  TempDir dir("determinism");
  const PipelineConfig config = smallConfig(dir, 1);
  runPipeline(config);
  const std::string first = readFile(config.outDir / "report.json");
  runPipeline(config);
  const std::string second = readFile(config.outDir / "report.json");
  CHECK(first == second);

  PipelineConfig threaded = smallConfig(dir, 4);
  runPipeline(threaded);
  const std::string third = readFile(config.outDir / "report.json");
  CHECK(first == third);
}

TEST_CASE("override rules are applied and echoed") {
  TempDir dir("override");
  PipelineConfig config = smallConfig(dir);
  // swap the weakest signal factor for a named noise column
  config.overrides.push_back(
      {"Pile weight", "noise_01", "field staff prefer the noise column"});
  const PipelineResult result = runPipeline(config);
  CHECK(std::find(result.finalFactors.begin(), result.finalFactors.end(),
                  "noise_01") != result.finalFactors.end());
  const Json report = Json::parse(readFile(config.outDir / "report.json"));
  CHECK(report.at("overrides").at("rules").size() == 1);
  CHECK(report.at("overrides").at("rules")[0].at("justification") ==
        "field staff prefer the noise column");
}

TEST_CASE("a stage failure writes partial outputs and a FAILED marker") {
  TempDir dir("failure");
  PipelineConfig config = smallConfig(dir);
  config.input = dir.path / "missing.csv";
  CHECK_THROWS_AS(runPipeline(config), StageError);
  CHECK(fs::exists(config.outDir / "FAILED"));
  const Json report = Json::parse(readFile(config.outDir / "report.json"));
  CHECK(report.contains("failed_stage"));
}

TEST_CASE("invariant violations are config errors before any stage runs") {
  TempDir dir("invalid");
  PipelineConfig config = smallConfig(dir);
  config.finalCount = 10;  // exceeds screening k
  CHECK_THROWS_AS(runPipeline(config), StageError);
  const std::string marker = readFile(config.outDir / "FAILED");
  CHECK(marker.find("[config]") != std::string::npos);
}

TEST_CASE("reproduction checks pass on the bundled data") {
  const ReproductionResult result =
      reproduceBundledStudy(std::string(QUAL_DATA_DIR));
  for (const CheckLine& check : result.checks) {
    INFO(check.name, " expected ", check.expected, " actual ", check.actual);
    CHECK(check.passed);
  }
  CHECK(result.allPassed());
  CHECK(result.failedCount() == 0);
  CHECK(result.text.find("[FAIL]") == std::string::npos);
  CHECK(result.structured.at("all_passed") == true);
  // the design echo is part of the report
  CHECK(result.text.find("Standard run") != std::string::npos);
  CHECK(result.text.find("0.8552") != std::string::npos);
}

TEST_CASE("reproduction is byte-identical across runs") {
  const auto a = reproduceBundledStudy(std::string(QUAL_DATA_DIR));
  const auto b = reproduceBundledStudy(std::string(QUAL_DATA_DIR));
  CHECK(a.structured.dump() == b.structured.dump());
  CHECK(a.text == b.text);
}

TEST_CASE("a corrupted bundled response fails its named cells") {
  TempDir dir("corrupt");
  // copy the data directory, then corrupt one response value
  for (const auto& entry :
       fs::directory_iterator(std::string(QUAL_DATA_DIR))) {
    fs::copy_file(entry.path(), dir.path / entry.path().filename());
  }
  std::string design = readFile(dir.path / "ccf_design.csv");
  const auto pos = design.find("0.911");
  REQUIRE(pos != std::string::npos);
  design.replace(pos, 5, "0.951");
  writeFile(dir.path / "ccf_design.csv", design);

  const ReproductionResult result = reproduceBundledStudy(dir.path);
  CHECK_FALSE(result.allPassed());
  CHECK(result.failedCount() > 0);
  bool namedEffectFailure = false;
  for (const CheckLine& check : result.checks) {
    if (!check.passed && check.name.find("effects:") == 0) {
      namedEffectFailure = true;
    }
  }
  CHECK(namedEffectFailure);
}
