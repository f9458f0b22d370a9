#include "qual/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "qual/baselines.hpp"
#include "qual/errors.hpp"
#include "qual/metrics.hpp"
#include "text_util.hpp"

namespace qual {
namespace {

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

void writeTextFile(const std::filesystem::path& path,
                   const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
}

struct ModelEvaluation {
  MetricReport trainMetrics;
  MetricReport testMetrics;
  std::optional<RiskReport> trainRisk;
  std::optional<RiskReport> testRisk;
};

ModelEvaluation evaluate(const Eigen::VectorXd& trainPred,
                         const Eigen::VectorXd& trainActual,
                         const Eigen::VectorXd& testPred,
                         const Eigen::VectorXd& testActual) {
  ModelEvaluation eval;
  eval.trainMetrics = regressionMetrics(trainPred, trainActual);
  eval.testMetrics = regressionMetrics(testPred, testActual);
  if (trainActual.size() >= 2) {
    eval.trainRisk = riskReport(trainPred, trainActual, "train");
  }
  if (testActual.size() >= 2) {
    eval.testRisk = riskReport(testPred, testActual, "test");
  }
  return eval;
}

Json evaluationJson(const ModelEvaluation& eval) {
  Json out;
  out["metrics"] =
      Json{{"train", metricsJson(eval.trainMetrics)},
           {"test", metricsJson(eval.testMetrics)}};
  Json risk;
  if (eval.trainRisk) risk["train"] = riskJson(*eval.trainRisk);
  if (eval.testRisk) risk["test"] = riskJson(*eval.testRisk);
  out["risk"] = std::move(risk);
  return out;
}

std::string renderRiskTable(
    const std::vector<std::pair<std::string, const ModelEvaluation*>>& rows) {
  std::vector<std::vector<std::string>> cells;
  for (const auto& [model, eval] : rows) {
    const auto add = [&](const std::string& split, const MetricReport& m,
                         const std::optional<RiskReport>& risk) {
      cells.push_back(
          {model, split,
           risk ? detail::formatFixed(risk->riskEstimate, 6) : std::string(),
           risk ? detail::formatFixed(risk->standardError, 6) : std::string(),
           detail::formatFixed(m.mse, 6), detail::formatFixed(m.rmse, 6),
           detail::formatFixed(m.mae, 6)});
    };
    add("train", eval->trainMetrics, eval->trainRisk);
    add("test", eval->testMetrics, eval->testRisk);
  }
  return renderTable(
      {"Model", "Split", "Risk estimate", "Standard error", "MSE", "RMSE",
       "MAE"},
      cells);
}

int maxTreeDepth(const ForestModel& forest) {
  int depth = 0;
  for (const auto& tree : forest.trees) {
    depth = std::max(depth, treeDepth(*tree));
  }
  return depth;
}

}  // namespace

Dataset prepareDataset(const PipelineConfig& config) {
  Dataset raw = loadTableFile(config.input, config.schema);
  raw.name = config.name;

  ReferenceTable reference;
  const ReferenceTable* referencePtr = nullptr;
  if (config.imputeStrategy == ImputeStrategy::ReferenceLookup) {
    if (!config.referencePath) {
      throw ConfigError("reference-lookup imputation needs a reference file");
    }
    reference = loadReferenceTableFile(*config.referencePath);
    referencePtr = &reference;
  }
  Dataset imputed = imputeMissing(raw, config.imputeStrategy, referencePtr);

  if (config.qualityScore) {
    return composeQualityScore(imputed, *config.qualityScore);
  }
  if (!imputed.responseIndex()) {
    throw ConfigError(
        "dataset has no response column and no quality_score spec");
  }
  return imputed;
}

PipelineResult runPipeline(const PipelineConfig& config) {
  PipelineResult result;
  Json& report = result.structured;
  report["report_version"] = kReportVersion;
  report["toolkit"] = Json{{"name", "qualtool"}, {"version", kToolkitVersion}};
  report["reproducibility"] = Json{{"seed", config.seed},
                                   {"config_digest", configDigest(config)}};
  std::ostringstream text;
  text << "Quality analytics pipeline: " << config.name << "\n"
       << "seed " << config.seed << ", config " << configDigest(config)
       << ", toolkit " << kToolkitVersion << "\n\n";

  const auto writeOutputs = [&](const std::string* failedStage,
                                const std::string* message) {
    std::filesystem::create_directories(config.outDir);
    if (failedStage) {
      report["failed_stage"] = *failedStage;
      report["error"] = *message;
      text << "\nFAILED at stage [" << *failedStage << "]: " << *message
           << "\n";
      writeTextFile(config.outDir / "FAILED",
                    "[" + *failedStage + "] " + *message + "\n");
    }
    writeTextFile(config.outDir / "report.json", report.dump(1, '\t') + "\n");
    writeTextFile(config.outDir / "report.txt", text.str());
  };

  std::string currentStage = "config";
  try {
    // config
    if (!std::filesystem::exists(config.input)) {
      throw ConfigError("input '" + config.input.string() + "' does not exist");
    }
    if (config.referencePath &&
        !std::filesystem::exists(*config.referencePath)) {
      throw ConfigError("reference '" + config.referencePath->string() +
                        "' does not exist");
    }
    if (config.screeningK < config.finalCount) {
      throw ConfigError("screening k must be at least final_count");
    }
    if (config.voteM < config.finalCount) {
      throw ConfigError("vote m must be at least final_count");
    }
    std::filesystem::create_directories(config.outDir);

    // ingest + impute + compose
    currentStage = "ingest";
    Dataset raw = loadTableFile(config.input, config.schema);
    raw.name = config.name;
    Eigen::Index missingCells = 0;
    for (const auto& col : raw.columns) missingCells += col.missingCount();

    currentStage = "impute";
    ReferenceTable reference;
    const ReferenceTable* referencePtr = nullptr;
    if (config.imputeStrategy == ImputeStrategy::ReferenceLookup) {
      if (!config.referencePath) {
        throw ConfigError("reference-lookup imputation needs a reference file");
      }
      reference = loadReferenceTableFile(*config.referencePath);
      referencePtr = &reference;
    }
    Dataset imputed = imputeMissing(raw, config.imputeStrategy, referencePtr);

    currentStage = "compose";
    Dataset composed = config.qualityScore
                           ? composeQualityScore(imputed, *config.qualityScore)
                           : std::move(imputed);
    if (!composed.responseIndex()) {
      throw ConfigError(
          "dataset has no response column and no quality_score spec");
    }
    const std::string responseName =
        composed.columns[*composed.responseIndex()].name;
    report["dataset"] = Json{{"name", composed.name},
                             {"rows", composed.rows()},
                             {"columns", composed.cols()},
                             {"inputs", composed.inputColumnIndices().size()},
                             {"response", responseName},
                             {"imputed_cells", missingCells},
                             {"impute_strategy",
                              imputeStrategyName(config.imputeStrategy)}};
    text << "dataset: " << composed.name << ", " << composed.rows()
         << " rows, " << composed.inputColumnIndices().size() << " inputs, "
         << missingCells << " imputed cells, response '" << responseName
         << "'\n\n";

    currentStage = "split";
    auto [train, test] = splitTrainTest(composed, config.testFraction,
                                        config.seed);
    report["split"] = Json{{"test_fraction", config.testFraction},
                           {"train_rows", train.rows()},
                           {"test_rows", test.rows()}};

    currentStage = "screen";
    const int nInputs = static_cast<int>(train.inputColumnIndices().size());
    const int k = std::min(config.screeningK, nInputs);
    ScreenResult screen = screenPredictors(train, k, config.seed,
                                           config.screeningTrees,
                                           config.nThreads);
    result.screened = screen.ranking.variables();
    {
      std::set<std::string> keep(result.screened.begin(),
                                 result.screened.end());
      for (Column& col : test.columns) {
        if (col.role == Role::Input && !keep.count(col.name)) {
          col.role = Role::Ignored;
        }
      }
    }
    report["screening"] = Json{{"k", k},
                               {"trees", config.screeningTrees},
                               {"ranking", importanceJson(screen.ranking)},
                               {"selected", result.screened}};
    text << "-- Screening (k=" << k << ", " << config.screeningTrees
         << " trees) --\n"
         << renderImportance(screen.ranking) << "\n";

    currentStage = "train";
    const ModelInput trainInput = toModelInput(screen.reduced);
    const ModelInput testInput = toModelInput(test);
    TrainConfig forestConfig = config.forest;
    forestConfig.seed = config.seed + 1;
    forestConfig.nThreads = config.nThreads;
    const ForestModel forest = fitRandomForest(trainInput, forestConfig);
    TrainConfig boostConfig = config.boosting;
    boostConfig.seed = config.seed + 2;
    const BoostedModel boosted = fitBoostedTrees(trainInput, boostConfig);
    const KnnModel knn = fitKnn(trainInput, config.knnK);
    std::optional<OlsModel> ols;
    if (config.olsBaseline) ols = fitOls(trainInput);

    currentStage = "evaluate";
    const ModelEvaluation forestEval =
        evaluate(predictMatrix(forest, trainInput.features),
                 trainInput.response,
                 predictMatrix(forest, testInput.features),
                 testInput.response);
    const ModelEvaluation boostedEval =
        evaluate(predictMatrix(boosted, trainInput.features),
                 trainInput.response,
                 predictMatrix(boosted, testInput.features),
                 testInput.response);
    const ModelEvaluation knnEval =
        evaluate(predictMatrix(knn, trainInput.features), trainInput.response,
                 predictMatrix(knn, testInput.features), testInput.response);
    std::optional<ModelEvaluation> olsEval;
    if (ols) {
      olsEval = evaluate(predictMatrix(*ols, trainInput.features),
                         trainInput.response,
                         predictMatrix(*ols, testInput.features),
                         testInput.response);
    }

    const ImportanceRanking forestImportance = variableImportance(forest);
    const ImportanceRanking boostedImportance = variableImportance(boosted);

    Json models;
    {
      Json f = evaluationJson(forestEval);
      f["trees"] = static_cast<int>(forest.trees.size());
      f["max_depth"] = maxTreeDepth(forest);
      f["oob_mse"] = outOfBagMse(forest, trainInput);
      f["importance"] = importanceJson(forestImportance);
      models["random_forest"] = std::move(f);

      Json b = evaluationJson(boostedEval);
      b["stages"] = static_cast<int>(boosted.stages.size());
      b["initial_value"] = boosted.initialValue;
      b["learn_rate"] = boosted.learnRate;
      b["importance"] = importanceJson(boostedImportance);
      models["boosted_tree"] = std::move(b);

      Json kj = evaluationJson(knnEval);
      kj["k"] = knn.k;
      models["knn"] = std::move(kj);

      if (ols) {
        Json oj = evaluationJson(*olsEval);
        oj["intercept"] = ols->intercept;
        Json coefs = Json::array();
        for (Eigen::Index j = 0; j < ols->coefficients.size(); ++j) {
          coefs.push_back(Json{
              {"variable", ols->featureNames[static_cast<std::size_t>(j)]},
              {"coefficient", ols->coefficients[j]}});
        }
        oj["coefficients"] = std::move(coefs);
        models["ols"] = std::move(oj);
      }
    }
    report["models"] = std::move(models);

    std::vector<std::pair<std::string, const ModelEvaluation*>> evalRows{
        {"random_forest", &forestEval},
        {"boosted_tree", &boostedEval},
        {"knn", &knnEval}};
    if (olsEval) evalRows.emplace_back("ols", &*olsEval);
    text << "-- Models --\n" << renderRiskTable(evalRows) << "\n";
    text << "random forest importance:\n"
         << renderImportance(forestImportance) << "\n";
    text << "boosted tree importance:\n"
         << renderImportance(boostedImportance) << "\n";

    currentStage = "vote";
    const std::vector<NamedRanking> rankings{
        {"random_forest", forestImportance.variables()},
        {"boosted_tree", boostedImportance.variables()}};
    const VotedSelection voted = voteRankings(rankings, config.voteM);
    result.voted = voted.variables();
    report["vote"] = voteJson(voted);
    text << "-- Vote (m=" << config.voteM << ") --\n" << renderVote(voted)
         << "\n";

    currentStage = "overrides";
    result.finalFactors =
        applyOverrides(voted, config.overrides, config.finalCount);
    {
      Json rules = Json::array();
      for (const auto& rule : config.overrides) {
        rules.push_back(Json{{"remove", rule.remove},
                             {"insert", rule.insert},
                             {"justification", rule.justification}});
        text << "override: remove '" << rule.remove << "', insert '"
             << rule.insert << "' -- " << rule.justification << "\n";
      }
      report["overrides"] =
          Json{{"rules", std::move(rules)}, {"final", result.finalFactors}};
    }
    text << "final factors:";
    for (const auto& name : result.finalFactors) text << " " << name << ";";
    text << "\n\n";

    currentStage = "design";
    std::vector<Factor> factors;
    if (config.factors) {
      factors = *config.factors;
    } else {
      for (const auto& name : result.finalFactors) {
        const Column& col = composed.column(name);
        std::vector<double> values(col.values.begin(), col.values.end());
        const double low = quantile(values, config.percentileLow);
        const double high = quantile(values, config.percentileHigh);
        if (!(low < high)) {
          throw DesignError("factor '" + name +
                            "' has a degenerate level range");
        }
        factors.push_back(Factor::fromRange(name, low, high));
      }
    }
    result.design = buildCcfDesign(factors, config.nCenter);
    report["factors"] = factorsJson(factors);
    report["design"] = designJson(result.design);
    text << "-- Design --\n" << renderDesign(result.design) << "\n";

    if (config.designResponses) {
      currentStage = "surface";
      const DesignTable designTable =
          readDesignCsvFile(*config.designResponses);
      if (!designTable.responses) {
        throw DesignError("design file '" +
                          config.designResponses->string() +
                          "' carries no response column");
      }
      SurfaceFit fit =
          fitResponseSurface(designTable.design, *designTable.responses);
      const OptimizationResult optimum =
          config.desirabilitySpec
              ? desirabilityOptimize(fit, *config.desirabilitySpec)
              : desirabilityOptimize(fit);
      Json surface = surfaceJson(fit, designTable.responseName);
      surface["optimum"] = optimumJson(optimum, fit.design.factors);
      report["surface"] = std::move(surface);
      text << "-- Surface fit (" << designTable.responseName << ") --\n"
           << renderEffects(fit.effects, fit.residualDf) << "\n"
           << renderAnova(fit.anova) << "\n"
           << "optimum: desirability "
           << detail::formatFixed(optimum.desirability, 4)
           << ", predicted response "
           << detail::formatFixed(optimum.predictedResponse, 6) << " at";
      for (std::size_t i = 0; i < fit.design.factors.size(); ++i) {
        text << " " << fit.design.factors[i].name << "="
             << detail::formatShortest(optimum.naturalLevels[i]);
      }
      text << "\n";
      result.surface = std::move(fit);
    }

    currentStage = "report";
    writeOutputs(nullptr, nullptr);
  } catch (const std::exception& e) {
    const std::string message = e.what();
    try {
      writeOutputs(&currentStage, &message);
    } catch (...) {
      // the marker write itself failed; surface the original error
    }
    throw StageError(currentStage, message);
  }

  result.text = text.str();
  return result;
}

bool ReproductionResult::allPassed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckLine& c) { return c.passed; });
}

int ReproductionResult::failedCount() const {
  return static_cast<int>(std::count_if(
      checks.begin(), checks.end(),
      [](const CheckLine& c) { return !c.passed; }));
}

}  // namespace qual
