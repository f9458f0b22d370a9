#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qual/dataset.hpp"
#include "qual/tree.hpp"

namespace qual {

// Bagged regression forest. Prediction is the arithmetic mean of the tree
// predictions; each tree's resample and feature draws come from a stream
// keyed on (seed, tree index), so training order and thread count cannot
// change the model.
struct ForestModel {
  std::vector<std::unique_ptr<TreeNode>> trees;
  std::vector<std::vector<int>> oobIndices;  // per tree, ascending
  std::vector<std::string> featureNames;
  TrainConfig config;
};

// Stagewise least-squares boosting with shrinkage. Stage k fits a small
// tree to the residuals of the model after k-1 stages on a fresh subsample.
struct BoostedStage {
  std::unique_ptr<TreeNode> tree;
  double scale = 1.0;
};

struct BoostedModel {
  double initialValue = 0.0;  // response mean
  double learnRate = 0.1;
  std::vector<BoostedStage> stages;
  std::vector<std::string> featureNames;
  TrainConfig config;
};

ForestModel fitRandomForest(const ModelInput& train, const TrainConfig& config);
BoostedModel fitBoostedTrees(const ModelInput& train, const TrainConfig& config);

double predictRow(const ForestModel& model,
                  const Eigen::Ref<const Eigen::VectorXd>& row);
double predictRow(const BoostedModel& model,
                  const Eigen::Ref<const Eigen::VectorXd>& row);
Eigen::VectorXd predictMatrix(const ForestModel& model,
                              const Eigen::MatrixXd& rows);
Eigen::VectorXd predictMatrix(const BoostedModel& model,
                              const Eigen::MatrixXd& rows);

double predictModel(const ForestModel& model,
                    const std::map<std::string, double>& row);
double predictModel(const BoostedModel& model,
                    const std::map<std::string, double>& row);

// Ordered (variable, score) list, scores normalized so the maximum is 100.
// Every input variable appears exactly once; ties break by name.
struct ImportanceEntry {
  std::string variable;
  double score = 0.0;
};

struct ImportanceRanking {
  std::vector<ImportanceEntry> entries;

  std::vector<std::string> variables() const;
  ImportanceRanking truncated(std::size_t k) const;
};

// Split-gain importance: total variance reduction contributed by splits on
// each variable across all trees (boosting: pre-shrinkage residual gains).
ImportanceRanking variableImportance(const ForestModel& model);
ImportanceRanking variableImportance(const BoostedModel& model);

// Mean squared error over rows predicted only by trees that did not see
// them during training.
double outOfBagMse(const ForestModel& model, const ModelInput& train);

}  // namespace qual
