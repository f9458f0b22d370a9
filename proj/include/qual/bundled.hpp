#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "qual/doe.hpp"
#include "qual/screening.hpp"

namespace qual {

// Loaders for the reference tables shipped under data/.

// factor_levels.csv: factor,low,center,high
std::vector<Factor> loadFactorLevelsCsv(const std::filesystem::path& path);

// model_rankings.csv: model,rank,variable
std::vector<NamedRanking> loadRankingsCsv(const std::filesystem::path& path);

// mlr_estimates.csv: factor settings plus the regression estimate and the
// expert-validated score for each design run.
struct MlrTable {
  std::vector<std::string> factorNames;
  Eigen::MatrixXd settings;   // rows x 3
  Eigen::VectorXd estimated;
  Eigen::VectorXd validated;
};
MlrTable loadMlrEstimatesCsv(const std::filesystem::path& path);

}  // namespace qual
