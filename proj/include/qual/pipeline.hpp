#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qual/config.hpp"
#include "qual/doe.hpp"
#include "qual/report.hpp"

namespace qual {

// ingest -> impute -> compose quality score
Dataset prepareDataset(const PipelineConfig& config);

struct PipelineResult {
  Json structured;
  std::string text;
  std::vector<std::string> screened;
  std::vector<std::string> voted;
  std::vector<std::string> finalFactors;
  ExperimentDesign design;
  std::optional<SurfaceFit> surface;
};

// Full orchestration. Writes report.txt and report.json under the config's
// output directory; a stage failure writes the partial outputs plus a
// FAILED marker and raises a StageError.
PipelineResult runPipeline(const PipelineConfig& config);

struct CheckLine {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct ReproductionResult {
  std::vector<CheckLine> checks;
  std::string text;
  Json structured;

  bool allPassed() const;
  int failedCount() const;
};

// Rebuilds the bundled experiment end to end: design generation against the
// bundled run table, the quadratic surface fit against the published
// effects and ANOVA tables, and the fixed prediction equation against the
// bundled estimates. One pass/fail line per checked value.
ReproductionResult reproduceBundledStudy(const std::filesystem::path& dataDir);

}  // namespace qual
