#include "qual/metrics.hpp"

#include <cmath>

#include "qual/errors.hpp"

namespace qual {

MetricReport regressionMetrics(const Eigen::VectorXd& predicted,
                               const Eigen::VectorXd& actual) {
  if (predicted.size() == 0) throw MetricError("empty prediction vector");
  if (predicted.size() != actual.size()) {
    throw MetricError("predicted and actual lengths differ (" +
                      std::to_string(predicted.size()) + " vs " +
                      std::to_string(actual.size()) + ")");
  }
  const Eigen::ArrayXd err = (predicted - actual).array();
  MetricReport report;
  report.n = predicted.size();
  report.mse = err.square().mean();
  report.rmse = std::sqrt(report.mse);
  report.mae = err.abs().mean();
  return report;
}

RiskReport riskReport(const Eigen::VectorXd& predicted,
                      const Eigen::VectorXd& actual,
                      const std::string& split) {
  if (predicted.size() != actual.size()) {
    throw MetricError("predicted and actual lengths differ");
  }
  const Eigen::Index n = predicted.size();
  if (n < 2) {
    throw MetricError("risk report needs at least two rows");
  }
  const Eigen::ArrayXd sq = (predicted - actual).array().square();
  RiskReport report;
  report.split = split;
  report.n = n;
  report.riskEstimate = sq.mean();
  const double variance =
      (sq - report.riskEstimate).square().sum() / static_cast<double>(n - 1);
  report.standardError = std::sqrt(variance / static_cast<double>(n));
  return report;
}

}  // namespace qual
