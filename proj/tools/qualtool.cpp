// Command-line front end for the quality analytics toolkit.
//
// Exit codes: 0 success, 1 stage failure, 2 configuration error,
// 3 reproduction-check failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "qual/baselines.hpp"
#include "qual/bundled.hpp"
#include "qual/config.hpp"
#include "qual/csv.hpp"
#include "qual/doe.hpp"
#include "qual/ensemble.hpp"
#include "qual/errors.hpp"
#include "qual/metrics.hpp"
#include "qual/model_io.hpp"
#include "qual/pipeline.hpp"
#include "qual/report.hpp"
#include "qual/screening.hpp"
#include "qual/synth.hpp"

#ifndef QUAL_DEFAULT_DATA_DIR
#define QUAL_DEFAULT_DATA_DIR "data"
#endif

namespace {

using qual::Json;

struct CommonOpts {
  std::string config;
  std::uint64_t seed = 0;
  bool seedSet = false;
  std::string out;
  std::string format = "text";
};

void addCommonFlags(CLI::App* cmd, CommonOpts& opts, bool needsConfig) {
  auto* configOpt =
      cmd->add_option("--config", opts.config, "pipeline configuration file");
  if (needsConfig) configOpt->required();
  cmd->add_option("--seed", opts.seed, "override the configured seed")
      ->each([&opts](const std::string&) { opts.seedSet = true; });
  cmd->add_option("--out", opts.out, "override the output directory");
  cmd->add_option("--format", opts.format, "stdout format")
      ->check(CLI::IsMember({"text", "structured"}));
}

qual::PipelineConfig loadConfig(const CommonOpts& opts) {
  qual::PipelineConfig config = qual::loadPipelineConfig(opts.config);
  if (opts.seedSet) config.seed = opts.seed;
  // precedence: --out flag, then QUALTOOL_OUT, then the config file
  if (const char* env = std::getenv("QUALTOOL_OUT");
      env && *env && opts.out.empty()) {
    config.outDir = env;
  }
  if (!opts.out.empty()) config.outDir = opts.out;
  return config;
}

void emit(const CommonOpts& opts, const std::string& text, const Json& json) {
  if (opts.format == "structured") {
    std::cout << json.dump(1, '\t') << '\n';
  } else {
    std::cout << text;
  }
}

int cmdPipeline(const CommonOpts& opts) {
  const qual::PipelineConfig config = loadConfig(opts);
  const qual::PipelineResult result = qual::runPipeline(config);
  emit(opts, result.text, result.structured);
  return 0;
}

int cmdScreen(const CommonOpts& opts, int kOverride) {
  const qual::PipelineConfig config = loadConfig(opts);
  const qual::Dataset data = qual::prepareDataset(config);
  const int k = kOverride > 0 ? kOverride : config.screeningK;
  const qual::ScreenResult screen = qual::screenPredictors(
      data, k, config.seed, config.screeningTrees, config.nThreads);
  Json json;
  json["k"] = k;
  json["ranking"] = qual::importanceJson(screen.ranking);
  json["selected"] = screen.ranking.variables();
  emit(opts, qual::renderImportance(screen.ranking), json);
  return 0;
}

int cmdTrain(const CommonOpts& opts, bool saveModels) {
  const qual::PipelineConfig config = loadConfig(opts);
  const qual::Dataset data = qual::prepareDataset(config);
  auto [train, test] = qual::splitTrainTest(data, config.testFraction,
                                            config.seed);
  const int nInputs = static_cast<int>(train.inputColumnIndices().size());
  const int k = std::min(config.screeningK, nInputs);
  qual::ScreenResult screen = qual::screenPredictors(
      train, k, config.seed, config.screeningTrees, config.nThreads);
  std::set<std::string> keep;
  for (const auto& e : screen.ranking.entries) keep.insert(e.variable);
  for (qual::Column& col : test.columns) {
    if (col.role == qual::Role::Input && !keep.count(col.name)) {
      col.role = qual::Role::Ignored;
    }
  }
  const qual::ModelInput trainInput = qual::toModelInput(screen.reduced);
  const qual::ModelInput testInput = qual::toModelInput(test);

  qual::TrainConfig forestConfig = config.forest;
  forestConfig.seed = config.seed + 1;
  forestConfig.nThreads = config.nThreads;
  const qual::ForestModel forest =
      qual::fitRandomForest(trainInput, forestConfig);
  qual::TrainConfig boostConfig = config.boosting;
  boostConfig.seed = config.seed + 2;
  const qual::BoostedModel boosted =
      qual::fitBoostedTrees(trainInput, boostConfig);

  std::ostringstream text;
  Json json;
  const auto addModel = [&](const std::string& name,
                            const Eigen::VectorXd& trainPred,
                            const Eigen::VectorXd& testPred) {
    const qual::RiskReport trainRisk =
        qual::riskReport(trainPred, trainInput.response, "train");
    const qual::RiskReport testRisk =
        qual::riskReport(testPred, testInput.response, "test");
    text << name << ": train risk "
         << qual::riskJson(trainRisk)["risk_estimate"].dump() << " (SE "
         << qual::riskJson(trainRisk)["standard_error"].dump()
         << "), test risk "
         << qual::riskJson(testRisk)["risk_estimate"].dump() << " (SE "
         << qual::riskJson(testRisk)["standard_error"].dump() << ")\n";
    json[name] = Json{{"train", qual::riskJson(trainRisk)},
                      {"test", qual::riskJson(testRisk)}};
  };
  addModel("random_forest", qual::predictMatrix(forest, trainInput.features),
           qual::predictMatrix(forest, testInput.features));
  addModel("boosted_tree", qual::predictMatrix(boosted, trainInput.features),
           qual::predictMatrix(boosted, testInput.features));
  const qual::KnnModel knn = qual::fitKnn(trainInput, config.knnK);
  addModel("knn", qual::predictMatrix(knn, trainInput.features),
           qual::predictMatrix(knn, testInput.features));
  if (config.olsBaseline) {
    const qual::OlsModel ols = qual::fitOls(trainInput);
    addModel("ols", qual::predictMatrix(ols, trainInput.features),
             qual::predictMatrix(ols, testInput.features));
  }
  text << "\nrandom forest importance:\n"
       << qual::renderImportance(qual::variableImportance(forest));
  text << "\nboosted tree importance:\n"
       << qual::renderImportance(qual::variableImportance(boosted));
  json["random_forest"]["importance"] =
      qual::importanceJson(qual::variableImportance(forest));
  json["boosted_tree"]["importance"] =
      qual::importanceJson(qual::variableImportance(boosted));

  if (saveModels) {
    std::filesystem::create_directories(config.outDir);
    qual::saveModelFile(forest, config.outDir / "random_forest.model.json");
    qual::saveModelFile(boosted, config.outDir / "boosted_tree.model.json");
    text << "\nmodels written to " << config.outDir.string() << "\n";
  }
  emit(opts, text.str(), json);
  return 0;
}

int cmdVote(const CommonOpts& opts, const std::string& rankingsPath, int m,
            int finalCount) {
  std::vector<qual::NamedRanking> rankings;
  std::vector<qual::OverrideRule> rules;
  if (!rankingsPath.empty()) {
    rankings = qual::loadRankingsCsv(rankingsPath);
    if (!opts.config.empty()) rules = loadConfig(opts).overrides;
  } else {
    if (opts.config.empty()) {
      throw qual::ConfigError("vote needs --rankings or --config");
    }
    const qual::PipelineConfig config = loadConfig(opts);
    rules = config.overrides;
    const qual::Dataset data = qual::prepareDataset(config);
    const qual::ModelInput input = qual::toModelInput(data);
    qual::TrainConfig forestConfig = config.forest;
    forestConfig.seed = config.seed + 1;
    forestConfig.nThreads = config.nThreads;
    qual::TrainConfig boostConfig = config.boosting;
    boostConfig.seed = config.seed + 2;
    rankings.push_back(
        {"random_forest",
         qual::variableImportance(qual::fitRandomForest(input, forestConfig))
             .variables()});
    rankings.push_back(
        {"boosted_tree",
         qual::variableImportance(qual::fitBoostedTrees(input, boostConfig))
             .variables()});
  }

  const qual::VotedSelection voted = qual::voteRankings(rankings, m);
  std::ostringstream text;
  text << qual::renderVote(voted);
  Json json = qual::voteJson(voted);
  if (finalCount > 0) {
    const auto final = qual::applyOverrides(voted, rules, finalCount);
    text << "\nfinal factors:";
    for (const auto& name : final) text << " " << name << ";";
    text << "\n";
    json["final"] = final;
  }
  emit(opts, text.str(), json);
  return 0;
}

int cmdDoeGen(const CommonOpts& opts, const std::string& levelsPath,
              int nCenter, const std::string& outFile) {
  std::vector<qual::Factor> factors;
  if (!levelsPath.empty()) {
    factors = qual::loadFactorLevelsCsv(levelsPath);
  } else if (!opts.config.empty()) {
    const qual::PipelineConfig config = loadConfig(opts);
    if (!config.factors) {
      throw qual::ConfigError("config declares no doe.factors");
    }
    factors = *config.factors;
  } else {
    throw qual::ConfigError("doe-gen needs --levels or --config");
  }
  const qual::ExperimentDesign design = qual::buildCcfDesign(factors, nCenter);
  if (!outFile.empty()) {
    qual::writeDesignCsvFile(design, nullptr, outFile);
    std::cout << "design with " << design.runs.size() << " runs written to "
              << outFile << "\n";
  } else if (opts.format == "structured") {
    std::cout << qual::designJson(design).dump(1, '\t') << '\n';
  } else {
    qual::writeDesignCsv(design, nullptr, std::cout);
  }
  return 0;
}

int cmdDoeFit(const CommonOpts& opts, const std::string& designPath,
              double lo, double hi, double shape, int rampFlags) {
  if (rampFlags == 1) {
    throw qual::ConfigError("--lo and --hi must be given together");
  }
  const bool haveRamp = rampFlags == 2;
  const qual::DesignTable table = qual::readDesignCsvFile(designPath);
  if (!table.responses) {
    throw qual::DesignError("design file '" + designPath +
                            "' carries no response column");
  }
  const qual::SurfaceFit fit =
      qual::fitResponseSurface(table.design, *table.responses);
  qual::OptimizationResult optimum;
  if (haveRamp) {
    optimum = qual::desirabilityOptimize(fit, {lo, hi, shape});
  } else {
    optimum = qual::desirabilityOptimize(fit);
  }

  std::ostringstream text;
  text << qual::renderEffects(fit.effects, fit.residualDf) << "\n"
       << qual::renderAnova(fit.anova) << "\noptimum: desirability "
       << optimum.desirability << ", predicted response "
       << optimum.predictedResponse << " at";
  for (std::size_t i = 0; i < fit.design.factors.size(); ++i) {
    text << " " << fit.design.factors[i].name << "="
         << optimum.naturalLevels[i];
  }
  text << "\n";
  Json json = qual::surfaceJson(fit, table.responseName);
  json["optimum"] = qual::optimumJson(optimum, fit.design.factors);
  emit(opts, text.str(), json);
  return 0;
}

int cmdPredict(const CommonOpts& opts, double pf, double mp, double pw,
               const std::string& designPath) {
  const double estimate = qual::predictQualityEquation(pf, mp, pw);
  std::ostringstream text;
  Json json;
  text << "equation estimate: " << estimate << "\n";
  json["equation_estimate"] = estimate;
  if (!designPath.empty()) {
    const qual::DesignTable table = qual::readDesignCsvFile(designPath);
    if (!table.responses) {
      throw qual::DesignError("design file carries no response column");
    }
    const qual::SurfaceFit fit =
        qual::fitResponseSurface(table.design, *table.responses);
    std::vector<double> levels;
    for (const auto& factor : fit.design.factors) {
      if (factor.name == "Pigment fastness") levels.push_back(pf);
      else if (factor.name == "Machine productivity") levels.push_back(mp);
      else if (factor.name == "Pile weight") levels.push_back(pw);
      else {
        throw qual::DesignError("design factor '" + factor.name +
                                "' has no matching flag");
      }
    }
    const qual::SurfacePrediction prediction = qual::predictSurface(fit, levels);
    text << "surface estimate: " << prediction.value
         << (prediction.extrapolated ? " (extrapolated)" : "") << "\n";
    json["surface_estimate"] = prediction.value;
    json["extrapolated"] = prediction.extrapolated;
  }
  emit(opts, text.str(), json);
  return 0;
}

int cmdSynth(int rows, int noiseVars, double noiseSd, std::uint64_t seed,
             const std::string& outFile) {
  const qual::Dataset data =
      qual::generateSynthetic(rows, noiseVars, noiseSd, seed);
  if (outFile.empty()) {
    qual::saveTable(data, std::cout);
  } else {
    qual::saveTableFile(data, outFile);
    std::cout << "synthetic table with " << data.rows() << " rows and "
              << data.cols() << " columns written to " << outFile << "\n";
  }
  return 0;
}

int cmdReproduce(const CommonOpts& opts, const std::string& dataDir) {
  const qual::ReproductionResult result =
      qual::reproduceBundledStudy(dataDir);
  emit(opts, result.text, result.structured);
  if (!opts.out.empty()) {
    std::filesystem::create_directories(opts.out);
    std::ofstream json(std::filesystem::path(opts.out) / "reproduction.json");
    json << result.structured.dump(1, '\t') << '\n';
    std::ofstream text(std::filesystem::path(opts.out) / "reproduction.txt");
    text << result.text;
  }
  return result.allPassed() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qualtool: ensemble-based predictor screening, variable voting, and "
      "blocked central composite experiments over production quality data"};
  app.require_subcommand(1);

  CommonOpts pipelineOpts;
  auto* pipeline =
      app.add_subcommand("pipeline", "run the full analysis pipeline");
  addCommonFlags(pipeline, pipelineOpts, true);

  CommonOpts screenOpts;
  int screenK = 0;
  auto* screen =
      app.add_subcommand("screen", "rank predictors and keep the top k");
  addCommonFlags(screen, screenOpts, true);
  screen->add_option("--k", screenK, "override the configured k");

  CommonOpts trainOpts;
  bool saveModels = false;
  auto* train = app.add_subcommand(
      "train", "fit the forest, boosted and baseline models");
  addCommonFlags(train, trainOpts, true);
  train->add_flag("--save-models", saveModels,
                  "persist the trained ensembles under the output directory");

  CommonOpts voteOpts;
  std::string rankingsPath;
  int voteM = 4;
  int voteFinal = 0;
  auto* vote = app.add_subcommand(
      "vote", "combine per-model rankings into the voted variable list");
  addCommonFlags(vote, voteOpts, false);
  vote->add_option("--rankings", rankingsPath,
                   "rankings CSV (model,rank,variable)");
  vote->add_option("--m", voteM, "top-m entries per model");
  vote->add_option("--final-count", voteFinal,
                   "apply overrides and truncate to this many factors");

  CommonOpts doeGenOpts;
  std::string levelsPath;
  std::string doeGenOut;
  int nCenter = 3;
  auto* doeGen = app.add_subcommand(
      "doe-gen", "generate the blocked face-centered composite design");
  addCommonFlags(doeGen, doeGenOpts, false);
  doeGen->add_option("--levels", levelsPath,
                     "factor levels CSV (factor,low,center,high)");
  doeGen->add_option("--n-center", nCenter, "number of center runs");
  doeGen->add_option("--design-out", doeGenOut, "write the design CSV here");

  CommonOpts doeFitOpts;
  std::string fitDesignPath;
  double rampLo = 0.0;
  double rampHi = 0.0;
  double rampShape = 1.0;
  auto* doeFit = app.add_subcommand(
      "doe-fit", "fit the quadratic surface and run the desirability search");
  addCommonFlags(doeFit, doeFitOpts, false);
  doeFit->add_option("--design", fitDesignPath,
                     "design CSV with a response column")
      ->required();
  auto* loOpt = doeFit->add_option("--lo", rampLo, "desirability ramp low end");
  auto* hiOpt = doeFit->add_option("--hi", rampHi, "desirability ramp high end");
  doeFit->add_option("--shape", rampShape, "desirability ramp exponent");

  CommonOpts predictOpts;
  double pf = 0.0;
  double mp = 0.0;
  double pw = 0.0;
  std::string predictDesignPath;
  auto* predict = app.add_subcommand(
      "predict", "evaluate the fixed quality-score prediction equation");
  addCommonFlags(predict, predictOpts, false);
  predict->add_option("--pigment-fastness", pf, "pigment fastness level")
      ->required();
  predict->add_option("--machine-productivity", mp,
                      "machine productivity level")
      ->required();
  predict->add_option("--pile-weight", pw, "pile weight level")->required();
  predict->add_option("--design", predictDesignPath,
                      "also predict from a surface fit of this design CSV");

  int synthRows = 2000;
  int synthNoise = 68;
  double synthSd = 0.01;
  std::uint64_t synthSeed = 0;
  std::string synthOut;
  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic production table");
  synth->add_option("--rows", synthRows, "row count");
  synth->add_option("--noise-vars", synthNoise, "unrelated noise columns");
  synth->add_option("--noise-sd", synthSd, "response noise level");
  synth->add_option("--seed", synthSeed, "generator seed");
  synth->add_option("--out", synthOut, "output CSV path");

  CommonOpts reproduceOpts;
  std::string dataDir = QUAL_DEFAULT_DATA_DIR;
  auto* reproduce = app.add_subcommand(
      "reproduce-paper",
      "check the bundled study against the published reference tables");
  addCommonFlags(reproduce, reproduceOpts, false);
  reproduce->add_option("--data-dir", dataDir, "bundled data directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (pipeline->parsed()) return cmdPipeline(pipelineOpts);
    if (screen->parsed()) return cmdScreen(screenOpts, screenK);
    if (train->parsed()) return cmdTrain(trainOpts, saveModels);
    if (vote->parsed()) {
      return cmdVote(voteOpts, rankingsPath, voteM, voteFinal);
    }
    if (doeGen->parsed()) {
      return cmdDoeGen(doeGenOpts, levelsPath, nCenter, doeGenOut);
    }
    if (doeFit->parsed()) {
      return cmdDoeFit(doeFitOpts, fitDesignPath, rampLo, rampHi, rampShape,
                       loOpt->count() > 0);
    }
    if (predict->parsed()) {
      return cmdPredict(predictOpts, pf, mp, pw, predictDesignPath);
    }
    if (synth->parsed()) {
      return cmdSynth(synthRows, synthNoise, synthSd, synthSeed, synthOut);
    }
    if (reproduce->parsed()) return cmdReproduce(reproduceOpts, dataDir);
  } catch (const qual::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const qual::StageError& e) {
    std::cerr << "stage failure " << e.what() << '\n';
    return 1;
  } catch (const qual::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
