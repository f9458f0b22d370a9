#include "qual/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "qual/errors.hpp"
#include "qual/least_squares.hpp"

namespace qual {

KnnModel fitKnn(const ModelInput& train, int k) {
  if (k < 1) throw FitError("knn needs k >= 1");
  if (train.rows() < k) {
    throw FitError("knn needs at least k training rows");
  }
  if (train.featureCount() == 0) {
    throw FitError("knn needs at least one input variable");
  }
  KnnModel model;
  model.k = k;
  model.featureNames = train.featureNames;
  model.response = train.response;
  model.columnMin = train.features.colwise().minCoeff().transpose();
  model.columnRange =
      train.features.colwise().maxCoeff().transpose() - model.columnMin;
  model.scaledFeatures.resize(train.rows(), train.featureCount());
  for (Eigen::Index j = 0; j < train.featureCount(); ++j) {
    const double range = model.columnRange[j];
    if (range > 0.0) {
      model.scaledFeatures.col(j) =
          (train.features.col(j).array() - model.columnMin[j]) / range;
    } else {
      model.scaledFeatures.col(j).setZero();
    }
  }
  return model;
}

double predictRow(const KnnModel& model,
                  const Eigen::Ref<const Eigen::VectorXd>& naturalRow) {
  const Eigen::Index n = model.scaledFeatures.rows();
  const Eigen::Index p = model.scaledFeatures.cols();
  Eigen::VectorXd scaled(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double range = model.columnRange[j];
    scaled[j] = range > 0.0 ? (naturalRow[j] - model.columnMin[j]) / range : 0.0;
  }

  std::vector<std::pair<double, Eigen::Index>> dist;
  dist.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    dist.emplace_back((model.scaledFeatures.row(i).transpose() - scaled)
                          .squaredNorm(),
                      i);
  }
  const auto kth = dist.begin() + model.k;
  std::partial_sort(dist.begin(), kth, dist.end());
  double sum = 0.0;
  for (auto it = dist.begin(); it != kth; ++it) {
    sum += model.response[it->second];
  }
  return sum / model.k;
}

Eigen::VectorXd predictMatrix(const KnnModel& model,
                              const Eigen::MatrixXd& rows) {
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out[i] = predictRow(model, rows.row(i));
  }
  return out;
}

OlsModel fitOls(const ModelInput& train) {
  if (train.rows() <= train.featureCount()) {
    throw FitError("ols needs more rows than input variables");
  }
  DesignMatrix design;
  design.values.resize(train.rows(), train.featureCount() + 1);
  design.values.col(0).setOnes();
  design.values.rightCols(train.featureCount()) = train.features;
  design.labels.push_back("(intercept)");
  for (const auto& name : train.featureNames) design.labels.push_back(name);

  const LeastSquaresSolution sol = solveLeastSquares(design, train.response);
  OlsModel model;
  model.intercept = sol.coefficients[0];
  model.coefficients = sol.coefficients.tail(train.featureCount());
  model.featureNames = train.featureNames;
  return model;
}

double predictRow(const OlsModel& model,
                  const Eigen::Ref<const Eigen::VectorXd>& row) {
  return model.intercept + model.coefficients.dot(row);
}

Eigen::VectorXd predictMatrix(const OlsModel& model,
                              const Eigen::MatrixXd& rows) {
  return (rows * model.coefficients).array() + model.intercept;
}

}  // namespace qual
