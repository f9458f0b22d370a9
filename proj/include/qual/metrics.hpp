#pragma once

#include <Eigen/Dense>

#include <string>

namespace qual {

struct MetricReport {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  Eigen::Index n = 0;
};

// Risk estimate = mean squared prediction error on a split; standard error
// = sample standard deviation of the per-row squared errors / sqrt(n).
struct RiskReport {
  std::string split;
  double riskEstimate = 0.0;
  double standardError = 0.0;
  Eigen::Index n = 0;
};

MetricReport regressionMetrics(const Eigen::VectorXd& predicted,
                               const Eigen::VectorXd& actual);

RiskReport riskReport(const Eigen::VectorXd& predicted,
                      const Eigen::VectorXd& actual, const std::string& split);

}  // namespace qual
