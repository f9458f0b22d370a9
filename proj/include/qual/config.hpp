#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qual/csv.hpp"
#include "qual/dataset.hpp"
#include "qual/doe.hpp"
#include "qual/impute.hpp"
#include "qual/screening.hpp"
#include "qual/tree.hpp"

namespace qual {

// Everything one pipeline run needs, loaded from a single JSON file.
// Relative paths resolve against the config file's directory.
struct PipelineConfig {
  std::string name = "dataset";
  std::filesystem::path input;
  CsvSchema schema;
  ImputeStrategy imputeStrategy = ImputeStrategy::ColumnMean;
  std::optional<std::filesystem::path> referencePath;
  std::optional<QualityScoreSpec> qualityScore;
  double testFraction = 0.25;
  std::uint64_t seed = 0;
  int screeningK = 16;
  int screeningTrees = 200;
  TrainConfig forest;
  TrainConfig boosting;
  int knnK = 5;
  bool olsBaseline = true;
  int voteM = 4;
  std::vector<OverrideRule> overrides;
  int finalCount = 3;
  std::optional<std::vector<Factor>> factors;  // else derived from data
  double percentileLow = 0.0;                  // quantiles for derived factors
  double percentileHigh = 1.0;
  int nCenter = 3;
  std::optional<std::filesystem::path> designResponses;
  std::optional<DesirabilitySpec> desirabilitySpec;
  std::filesystem::path outDir = "out";
  int nThreads = 1;
};

// Defaults: forest 100 trees; boosting 500 two-leaf stages, learn rate 0.1,
// subsample 0.5.
PipelineConfig defaultPipelineConfig();

PipelineConfig loadPipelineConfig(const std::filesystem::path& path);

// Stable hex digest of the effective configuration.
std::string configDigest(const PipelineConfig& config);

}  // namespace qual
