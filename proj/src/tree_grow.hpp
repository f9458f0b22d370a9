#pragma once

// Internal tree-growing machinery shared by the standalone tree fitter and
// the ensemble trainers. Not part of the public interface.

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <vector>

#include "qual/random.hpp"
#include "qual/tree.hpp"

namespace qual::detail {

// Row indices per feature, sorted by (value, row). Computed once per
// training matrix and shared across trees.
std::vector<std::vector<int>> sortFeatureOrders(const Eigen::MatrixXd& x);

struct GrowContext {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& y;
  const std::vector<std::vector<int>>& order;
  // Per-row effective weight and multiplicity; rows with count 0 are
  // excluded from the fit entirely.
  const std::vector<double>& weight;
  const std::vector<std::int64_t>& count;
  // Rank of each feature name in ascending order; breaks gain ties.
  const std::vector<int>& nameRank;
  int maxLeafNodes = 0;
  int minRowsPerLeaf = 1;
  int mtry = 0;  // 0 or >= p means all features
  int kBestSplits = 1;
  Rng* rng = nullptr;  // required when mtry < p or kBestSplits > 1
};

std::unique_ptr<TreeNode> growTree(const GrowContext& ctx);

std::vector<int> featureNameRanks(const std::vector<std::string>& names);

}  // namespace qual::detail
