#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qual/dataset.hpp"

namespace qual {

// Shared training knobs for trees, forests and boosted ensembles.
struct TrainConfig {
  int nTrees = 100;                // trees (forest) or stages (boosting)
  int maxLeafNodes = 0;            // 0 = unlimited
  int minRowsPerLeaf = 5;
  int mtry = 0;                    // candidate features per split; 0 = ceil(p/3); forests only
  double subsampleFraction = 0.5;  // boosting stage subsample (and forest subsample mode)
  double learnRate = 0.1;          // boosting shrinkage
  std::uint64_t seed = 0;
  bool withReplacement = true;     // forest resampling: bootstrap vs subsample
  int kBestSplits = 1;             // >1 draws the split among the K best candidates
  int nThreads = 1;                // 0 = hardware concurrency
};

// Binary regression tree node. Internal nodes route value < threshold to
// the left child; leaves predict the weighted mean response of their rows.
struct TreeNode {
  int splitVariable = -1;  // feature index, -1 for leaves
  double threshold = 0.0;
  double value = 0.0;
  double gain = 0.0;       // SSE reduction achieved by this split
  std::int64_t rows = 0;   // training rows routed here (with multiplicity)
  std::unique_ptr<TreeNode> left;
  std::unique_ptr<TreeNode> right;

  bool isLeaf() const { return splitVariable < 0; }
};

int leafCount(const TreeNode& node);
int treeDepth(const TreeNode& node);

// Greedy best-first growth maximizing weighted variance reduction. Stops at
// maxLeafNodes, minRowsPerLeaf, or zero attainable reduction.
std::unique_ptr<TreeNode> fitRegressionTree(
    const ModelInput& train, const TrainConfig& config,
    const std::vector<double>* rowWeights = nullptr);

double predictRow(const TreeNode& tree,
                  const Eigen::Ref<const Eigen::VectorXd>& row);

// Prediction from a variable -> value mapping; a missing variable the tree
// splits on raises a prediction error naming it.
double predictModel(const TreeNode& tree,
                    const std::vector<std::string>& featureNames,
                    const std::map<std::string, double>& row);

}  // namespace qual
