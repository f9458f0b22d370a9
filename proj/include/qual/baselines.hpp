#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "qual/dataset.hpp"

namespace qual {

// k-nearest-neighbour regression under per-column min-max scaled Euclidean
// distance. Distance ties break by training row index.
struct KnnModel {
  int k = 5;
  Eigen::MatrixXd scaledFeatures;
  Eigen::VectorXd response;
  Eigen::VectorXd columnMin;
  Eigen::VectorXd columnRange;  // 0 for constant columns (dimension ignored)
  std::vector<std::string> featureNames;
};

KnnModel fitKnn(const ModelInput& train, int k);
double predictRow(const KnnModel& model,
                  const Eigen::Ref<const Eigen::VectorXd>& naturalRow);
Eigen::VectorXd predictMatrix(const KnnModel& model,
                              const Eigen::MatrixXd& rows);

// Ordinary least squares with intercept.
struct OlsModel {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;  // per feature
  std::vector<std::string> featureNames;
};

OlsModel fitOls(const ModelInput& train);
double predictRow(const OlsModel& model,
                  const Eigen::Ref<const Eigen::VectorXd>& row);
Eigen::VectorXd predictMatrix(const OlsModel& model,
                              const Eigen::MatrixXd& rows);

}  // namespace qual
