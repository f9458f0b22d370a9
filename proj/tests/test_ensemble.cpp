#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "qual/ensemble.hpp"
#include "qual/errors.hpp"
#include "qual/metrics.hpp"
#include "qual/model_io.hpp"

using namespace qual;

namespace {

double heldOutMse(const Eigen::VectorXd& predicted,
                  const Eigen::VectorXd& actual) {
  return regressionMetrics(predicted, actual).mse;
}

double boostedTrainMse(const BoostedModel& model, const ModelInput& input,
                       std::size_t stages) {
  double out = 0.0;
  for (Eigen::Index i = 0; i < input.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < stages; ++k) {
      sum += model.stages[k].scale *
             predictRow(*model.stages[k].tree, input.features.row(i));
    }
    const double err =
        model.initialValue + model.learnRate * sum - input.response[i];
    out += err * err;
  }
  return out / static_cast<double>(input.rows());
}

}  // namespace

TEST_CASE("a one-tree forest predicts exactly what its tree predicts") {
  const ModelInput input = test::signalInput(60, 3, 0.2, 10);
  TrainConfig config;
  config.nTrees = 1;
  config.mtry = 3;
  config.minRowsPerLeaf = 2;
  const ForestModel forest = fitRandomForest(input, config);
  REQUIRE(forest.trees.size() == 1);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd row = input.features.row(i);
    CHECK(predictRow(forest, row) == predictRow(*forest.trees[0], row));
  }
}

TEST_CASE("forest prediction is the exact mean of its trees") {
  const ModelInput input = test::signalInput(80, 4, 0.3, 11);
  TrainConfig config;
  config.nTrees = 13;
  config.minRowsPerLeaf = 3;
  const ForestModel forest = fitRandomForest(input, config);
  Rng rng(999);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd row(4);
    for (int j = 0; j < 4; ++j) row[j] = rng.uniform();
    double sum = 0.0;
    for (const auto& tree : forest.trees) sum += predictRow(*tree, row);
    CHECK(predictRow(forest, row) ==
          doctest::Approx(sum / 13.0).epsilon(1e-15));
  }
}

TEST_CASE("hand-built two-tree forest averages 0.8 and 0.9 to 0.85") {
  ForestModel forest;
  forest.featureNames = {"x"};
  auto a = std::make_unique<TreeNode>();
  a->value = 0.8;
  auto b = std::make_unique<TreeNode>();
  b->value = 0.9;
  forest.trees.push_back(std::move(a));
  forest.trees.push_back(std::move(b));
  CHECK(predictModel(forest, {{"x", 0.0}}) ==
        doctest::Approx(0.85).epsilon(1e-15));
}

TEST_CASE("identical seeds give identical forests; seeds change them") {
  const ModelInput input = test::signalInput(100, 5, 0.2, 12);
  TrainConfig config;
  config.nTrees = 20;
  config.seed = 77;
  const ForestModel a = fitRandomForest(input, config);
  const ForestModel b = fitRandomForest(input, config);
  config.seed = 78;
  const ForestModel c = fitRandomForest(input, config);
  Rng rng(1000);
  bool anyDifferent = false;
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd row(5);
    for (int j = 0; j < 5; ++j) row[j] = rng.uniform();
    CHECK(predictRow(a, row) == predictRow(b, row));
    if (predictRow(a, row) != predictRow(c, row)) anyDifferent = true;
  }
  CHECK(anyDifferent);
}

TEST_CASE("thread count does not change the trained forest") {
  const ModelInput input = test::signalInput(120, 6, 0.3, 13);
  TrainConfig config;
  config.nTrees = 12;
  config.seed = 5;
  config.nThreads = 1;
  const ForestModel sequential = fitRandomForest(input, config);
  config.nThreads = 4;
  const ForestModel threaded = fitRandomForest(input, config);
  REQUIRE(sequential.trees.size() == threaded.trees.size());
  CHECK(sequential.oobIndices == threaded.oobIndices);
  Rng rng(1001);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::VectorXd row(6);
    for (int j = 0; j < 6; ++j) row[j] = rng.uniform();
    CHECK(predictRow(sequential, row) == predictRow(threaded, row));
  }
}

TEST_CASE("out-of-bag bookkeeping marks exactly the undrawn rows") {
  const ModelInput input = test::signalInput(50, 2, 0.1, 14);
  TrainConfig config;
  config.nTrees = 10;
  config.minRowsPerLeaf = 2;
  const ForestModel forest = fitRandomForest(input, config);
  for (const auto& oob : forest.oobIndices) {
    CHECK(std::is_sorted(oob.begin(), oob.end()));
    // with-replacement bootstrap leaves about a third of rows out
    CHECK(oob.size() > 0);
    CHECK(oob.size() < 40);
  }
  CHECK(outOfBagMse(forest, input) >= 0.0);
}

TEST_CASE("without-replacement subsampling leaves 1-fraction of rows out") {
  const ModelInput input = test::signalInput(40, 2, 0.1, 15);
  TrainConfig config;
  config.nTrees = 5;
  config.withReplacement = false;
  config.subsampleFraction = 0.6;
  config.minRowsPerLeaf = 2;
  const ForestModel forest = fitRandomForest(input, config);
  for (const auto& oob : forest.oobIndices) {
    CHECK(oob.size() == 16);  // 40 - round(0.6 * 40)
  }
}

TEST_CASE("boosting with learn rate 1 nails a separable step in one stump") {
  ModelInput input;
  input.features.resize(20, 1);
  input.response.resize(20);
  for (int i = 0; i < 20; ++i) {
    input.features(i, 0) = i < 10 ? 0.0 : 1.0;
    input.response[i] = i < 10 ? 0.0 : 1.0;
  }
  input.featureNames = {"x"};
  TrainConfig config;
  config.nTrees = 1;
  config.maxLeafNodes = 2;
  config.minRowsPerLeaf = 1;
  config.learnRate = 1.0;
  config.subsampleFraction = 1.0;
  const BoostedModel model = fitBoostedTrees(input, config);
  for (int i = 0; i < 20; ++i) {
    CHECK(predictRow(model, input.features.row(i)) ==
          doctest::Approx(input.response[i]).epsilon(1e-12));
  }
}

TEST_CASE("zero stages predict the response mean everywhere") {
  const ModelInput input = test::signalInput(30, 2, 0.2, 16);
  TrainConfig config;
  config.nTrees = 0;
  const BoostedModel model = fitBoostedTrees(input, config);
  CHECK(model.initialValue ==
        doctest::Approx(input.response.mean()).epsilon(1e-15));
  Eigen::VectorXd row(2);
  row << 0.3, 0.7;
  CHECK(predictRow(model, row) == model.initialValue);
}

TEST_CASE("hand-built boosted model follows the additive formula") {
  BoostedModel model;
  model.featureNames = {"x"};
  model.initialValue = 0.5;
  model.learnRate = 0.5;
  BoostedStage stage;
  stage.tree = std::make_unique<TreeNode>();
  stage.tree->value = 0.2;
  model.stages.push_back(std::move(stage));
  CHECK(predictModel(model, {{"x", 1.0}}) ==
        doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("boosted train mse is non-increasing per stage at subsample 1") {
  for (std::uint64_t seed : {21u, 22u}) {
    const ModelInput input = test::signalInput(80, 3, 0.3, seed);
    TrainConfig config;
    config.nTrees = 60;
    config.maxLeafNodes = 2;
    config.minRowsPerLeaf = 2;
    config.learnRate = 0.3;
    config.subsampleFraction = 1.0;
    config.seed = seed;
    const BoostedModel model = fitBoostedTrees(input, config);
    double last = boostedTrainMse(model, input, 0);
    for (std::size_t k = 1; k <= model.stages.size(); ++k) {
      const double current = boostedTrainMse(model, input, k);
      CHECK(current <= last + 1e-12);
      last = current;
    }
  }
}

TEST_CASE("unshrunk full-sample boosting drives train mse to zero") {
  const ModelInput input = test::signalInput(40, 2, 0.25, 23);
  TrainConfig config;
  config.nTrees = 120;
  config.maxLeafNodes = 0;  // unlimited
  config.minRowsPerLeaf = 1;
  config.learnRate = 1.0;
  config.subsampleFraction = 1.0;
  const BoostedModel model = fitBoostedTrees(input, config);
  CHECK(boostedTrainMse(model, input, model.stages.size()) < 1e-18);
}

TEST_CASE("boosting rejects invalid knobs") {
  const ModelInput input = test::signalInput(20, 2, 0.1, 24);
  TrainConfig config;
  SUBCASE("learn rate zero") {
    config.learnRate = 0.0;
    CHECK_THROWS_AS(fitBoostedTrees(input, config), FitError);
  }
  SUBCASE("learn rate above one") {
    config.learnRate = 1.5;
    CHECK_THROWS_AS(fitBoostedTrees(input, config), FitError);
  }
  SUBCASE("subsample fraction zero") {
    config.subsampleFraction = 0.0;
    CHECK_THROWS_AS(fitBoostedTrees(input, config), FitError);
  }
  SUBCASE("one leaf") {
    config.maxLeafNodes = 1;
    CHECK_THROWS_AS(fitBoostedTrees(input, config), FitError);
  }
}

TEST_CASE("forest beats a single tree on held-out data (median of 20 seeds)") {
  std::vector<double> forestMse;
  std::vector<double> treeMse;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ModelInput all = test::signalInput(240, 5, 0.25, seed + 400);
    ModelInput train;
    ModelInput test;
    const int nTrain = 160;
    train.features = all.features.topRows(nTrain);
    train.response = all.response.head(nTrain);
    train.featureNames = all.featureNames;
    test.features = all.features.bottomRows(240 - nTrain);
    test.response = all.response.tail(240 - nTrain);
    test.featureNames = all.featureNames;

    TrainConfig config;
    config.nTrees = 100;
    config.seed = seed;
    config.minRowsPerLeaf = 5;
    const ForestModel forest = fitRandomForest(train, config);
    forestMse.push_back(
        heldOutMse(predictMatrix(forest, test.features), test.response));

    TrainConfig treeConfig;
    treeConfig.minRowsPerLeaf = 5;
    const auto tree = fitRegressionTree(train, treeConfig);
    Eigen::VectorXd treePred(test.rows());
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
      treePred[i] = predictRow(*tree, test.features.row(i));
    }
    treeMse.push_back(heldOutMse(treePred, test.response));
  }
  std::sort(forestMse.begin(), forestMse.end());
  std::sort(treeMse.begin(), treeMse.end());
  const double forestMedian =
      0.5 * (forestMse[9] + forestMse[10]);
  const double treeMedian = 0.5 * (treeMse[9] + treeMse[10]);
  CHECK(forestMedian <= treeMedian);
}

TEST_CASE("importance: a pure signal variable ranks first with score 100") {
  const ModelInput input = test::signalInput(200, 5, 0.0, 30);
  TrainConfig config;
  config.nTrees = 50;
  config.minRowsPerLeaf = 2;
  const ForestModel forest = fitRandomForest(input, config);
  const ImportanceRanking forestRanking = variableImportance(forest);
  CHECK(forestRanking.entries.front().variable == "x1");
  CHECK(forestRanking.entries.front().score == doctest::Approx(100.0));

  TrainConfig boostConfig;
  boostConfig.nTrees = 80;
  boostConfig.maxLeafNodes = 2;
  boostConfig.minRowsPerLeaf = 2;
  boostConfig.learnRate = 0.3;
  boostConfig.subsampleFraction = 1.0;
  const BoostedModel boosted = fitBoostedTrees(input, boostConfig);
  const ImportanceRanking boostedRanking = variableImportance(boosted);
  CHECK(boostedRanking.entries.front().variable == "x1");
  CHECK(boostedRanking.entries.front().score == doctest::Approx(100.0));
}

TEST_CASE("importance on pure noise stays near-uniform (median of 20 seeds)") {
  std::vector<double> maxOverMean;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng = Rng::stream(seed, 31);
    ModelInput input;
    const int n = 300;
    const int p = 8;
    input.features.resize(n, p);
    input.response.resize(n);
    for (int j = 0; j < p; ++j) {
      input.featureNames.push_back("n" + std::to_string(j));
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < p; ++j) input.features(i, j) = rng.uniform();
      input.response[i] = rng.normal();  // unrelated to every feature
    }
    TrainConfig config;
    config.nTrees = 200;
    config.seed = seed;
    config.minRowsPerLeaf = 5;
    const ImportanceRanking ranking =
        variableImportance(fitRandomForest(input, config));
    double mean = 0.0;
    for (const auto& e : ranking.entries) mean += e.score;
    mean /= static_cast<double>(ranking.entries.size());
    maxOverMean.push_back(ranking.entries.front().score / mean);
  }
  std::sort(maxOverMean.begin(), maxOverMean.end());
  const double median = 0.5 * (maxOverMean[9] + maxOverMean[10]);
  CHECK(median <= 3.0);
}

TEST_CASE("importance lists every input exactly once, ties by name") {
  ModelInput input;
  input.features.resize(30, 3);
  input.response.resize(30);
  Rng rng(32);
  for (int i = 0; i < 30; ++i) {
    const double v = rng.uniform();
    input.features(i, 0) = v;
    input.features(i, 1) = v;  // duplicate signal, equal gains
    input.features(i, 2) = rng.uniform();
    input.response[i] = v;
  }
  input.featureNames = {"zz", "aa", "mm"};
  TrainConfig config;
  config.nTrees = 1;
  config.mtry = 3;
  config.minRowsPerLeaf = 2;
  config.withReplacement = false;
  config.subsampleFraction = 1.0;
  const ImportanceRanking ranking =
      variableImportance(fitRandomForest(input, config));
  REQUIRE(ranking.entries.size() == 3);
  std::set<std::string> names;
  for (const auto& e : ranking.entries) names.insert(e.variable);
  CHECK(names.size() == 3);
  // the duplicate column pair carries all gains; tie broken alphabetically
  CHECK(ranking.entries[0].variable == "aa");
}

TEST_CASE("importance is stable over row order given canonical sorting") {
  // canonicalize-then-train: any row permutation collapses to the same data
  const ModelInput base = test::signalInput(50, 3, 0.2, 33);
  std::vector<int> order(50);
  for (int i = 0; i < 50; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return base.features(a, 0) < base.features(b, 0);
  });
  ModelInput sorted;
  sorted.features.resize(50, 3);
  sorted.response.resize(50);
  sorted.featureNames = base.featureNames;
  for (int i = 0; i < 50; ++i) {
    sorted.features.row(i) = base.features.row(order[static_cast<std::size_t>(i)]);
    sorted.response[i] = base.response[order[static_cast<std::size_t>(i)]];
  }
  // shuffle, then canonicalize back by the same key
  ModelInput shuffled = sorted;
  Rng rng(34);
  for (int i = 49; i > 0; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    shuffled.features.row(i).swap(shuffled.features.row(j));
    std::swap(shuffled.response[i], shuffled.response[j]);
  }
  std::vector<int> backOrder(50);
  for (int i = 0; i < 50; ++i) backOrder[static_cast<std::size_t>(i)] = i;
  std::sort(backOrder.begin(), backOrder.end(), [&](int a, int b) {
    return shuffled.features(a, 0) < shuffled.features(b, 0);
  });
  ModelInput canonical;
  canonical.features.resize(50, 3);
  canonical.response.resize(50);
  canonical.featureNames = base.featureNames;
  for (int i = 0; i < 50; ++i) {
    canonical.features.row(i) =
        shuffled.features.row(backOrder[static_cast<std::size_t>(i)]);
    canonical.response[i] = shuffled.response[backOrder[static_cast<std::size_t>(i)]];
  }

  TrainConfig config;
  config.nTrees = 30;
  config.seed = 9;
  config.minRowsPerLeaf = 2;
  const ImportanceRanking a =
      variableImportance(fitRandomForest(sorted, config));
  const ImportanceRanking b =
      variableImportance(fitRandomForest(canonical, config));
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].variable == b.entries[i].variable);
    CHECK(a.entries[i].score == b.entries[i].score);
  }
}

TEST_CASE("model persistence round-trips predictions exactly") {
  const ModelInput input = test::signalInput(60, 3, 0.2, 35);
  TrainConfig config;
  config.nTrees = 7;
  config.seed = 3;
  config.minRowsPerLeaf = 2;
  const ForestModel forest = fitRandomForest(input, config);
  std::stringstream forestBuf;
  saveModel(forest, forestBuf);
  const ForestModel forestCopy = loadForestModel(forestBuf);

  TrainConfig boostConfig;
  boostConfig.nTrees = 15;
  boostConfig.maxLeafNodes = 2;
  boostConfig.minRowsPerLeaf = 2;
  const BoostedModel boosted = fitBoostedTrees(input, boostConfig);
  std::stringstream boostBuf;
  saveModel(boosted, boostBuf);
  const BoostedModel boostedCopy = loadBoostedModel(boostBuf);

  Rng rng(36);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd row(3);
    for (int j = 0; j < 3; ++j) row[j] = rng.uniform();
    CHECK(predictRow(forest, row) == predictRow(forestCopy, row));
    CHECK(predictRow(boosted, row) == predictRow(boostedCopy, row));
  }
  CHECK(forest.oobIndices == forestCopy.oobIndices);

  std::stringstream wrongKind;
  saveModel(forest, wrongKind);
  CHECK_THROWS_AS(loadBoostedModel(wrongKind), IoError);
}

TEST_CASE("forest configuration errors") {
  const ModelInput input = test::signalInput(30, 3, 0.1, 37);
  TrainConfig config;
  SUBCASE("zero trees") {
    config.nTrees = 0;
    CHECK_THROWS_AS(fitRandomForest(input, config), FitError);
  }
  SUBCASE("mtry out of range") {
    config.mtry = 4;
    CHECK_THROWS_AS(fitRandomForest(input, config), FitError);
  }
}
