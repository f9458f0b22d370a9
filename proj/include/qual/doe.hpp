#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qual/least_squares.hpp"

namespace qual {

// Face-centered factor: coded -1/0/+1 map to low/center/high, and the
// center must sit at the midpoint of the range.
struct Factor {
  std::string name;
  double low = 0.0;
  double center = 0.5;
  double high = 1.0;

  static Factor fromRange(const std::string& name, double low, double high);
};

void validateFactor(const Factor& f);

double toCoded(const Factor& f, double natural);
double fromCoded(const Factor& f, double coded);

struct DesignRun {
  int standardOrder = 0;
  int block = 0;
  std::vector<double> coded;
  std::vector<double> natural;
};

struct ExperimentDesign {
  std::vector<Factor> factors;
  std::vector<DesignRun> runs;  // ascending standard order
  int nCenter = 0;

  int blockCount() const;
};

// Blocked face-centered central composite layout for exactly three factors:
// 8 corners split into two half-fraction blocks by the sign of x1*x2*x3
// (block 1 carries the -1 corners), 6 face points in block 3, and center
// replicates distributed one per block. Standard order: block-1 corners in
// lexicographic coded order, block-1 centers, block-2 corners, block-2
// centers, face points (factor by factor, low then high), block-3 centers.
ExperimentDesign buildCcfDesign(const std::vector<Factor>& factors,
                                int nCenter = 3);

void writeDesignCsv(const ExperimentDesign& design,
                    const Eigen::VectorXd* responses, std::ostream& out,
                    const std::string& responseName = "Response");
void writeDesignCsvFile(const ExperimentDesign& design,
                        const Eigen::VectorXd* responses,
                        const std::filesystem::path& path,
                        const std::string& responseName = "Response");

struct DesignTable {
  ExperimentDesign design;
  std::optional<Eigen::VectorXd> responses;
  std::string responseName;
};

// Reads standard_order, block, one column per factor, optional trailing
// response column. Factor levels are recovered from the three distinct
// values of each column.
DesignTable readDesignCsv(std::istream& in);
DesignTable readDesignCsvFile(const std::filesystem::path& path);

struct EffectRow {
  std::string term;
  double effect = 0.0;
  double standardError = 0.0;
  double t = 0.0;
  double p = 1.0;
};

struct AnovaRow {
  std::string term;
  double ss = 0.0;
  int df = 0;
  std::optional<double> ms;
  std::optional<double> f;
  std::optional<double> p;
};

// Quadratic surface fit in coded units over the 12-term model
// {intercept, block contrasts, linear, quadratic, pairwise interactions}.
//
// Conventions, frozen against the reference tables this toolkit reproduces:
//  - quadratic columns are raw coded squares (no centering), so the
//    intercept is the predicted response at the design center;
//  - blocks enter as deviation contrasts with block 1 as the reference
//    (column j is +1 in block j+1, -1 in block 1);
//  - every reported effect except the intercept is twice the coded
//    coefficient, blocks included, with standard errors scaled the same way;
//  - ANOVA uses drop-one (partial) sums of squares, which makes F = t^2
//    for single-degree-of-freedom terms.
struct SurfaceFit {
  ExperimentDesign design;
  Eigen::VectorXd responses;
  LeastSquaresSolution solution;
  std::vector<EffectRow> effects;
  std::vector<AnovaRow> anova;
  double errorMs = 0.0;
  double totalSs = 0.0;
  Eigen::Index residualDf = 0;
};

SurfaceFit fitResponseSurface(const ExperimentDesign& design,
                              const Eigen::VectorXd& responses);

inline const std::vector<EffectRow>& effectsTable(const SurfaceFit& fit) {
  return fit.effects;
}
inline const std::vector<AnovaRow>& anovaTable(const SurfaceFit& fit) {
  return fit.anova;
}

struct SurfacePrediction {
  double value = 0.0;
  bool extrapolated = false;  // some |coded level| > 1
};

// Evaluates the coded quadratic with block contribution zero.
SurfacePrediction predictSurface(const SurfaceFit& fit,
                                 std::span<const double> naturalLevels);

// Larger-is-better ramp: 0 below lo, 1 above hi, ((y-lo)/(hi-lo))^shape
// between.
struct DesirabilitySpec {
  double lo = 0.0;
  double hi = 1.0;
  double shape = 1.0;
};

double desirability(double predicted, const DesirabilitySpec& spec);

struct OptimizationResult {
  std::vector<double> codedLevels;
  std::vector<double> naturalLevels;
  double desirability = 0.0;
  double predictedResponse = 0.0;
};

// Dense grid search over the coded cube followed by coordinate-descent
// refinement; deterministic. Ties in desirability break toward the higher
// predicted response, then the earlier grid point.
OptimizationResult desirabilityOptimize(const SurfaceFit& fit,
                                        const DesirabilitySpec& spec,
                                        int gridPoints = 41);

// Defaults: lo/hi from the observed response range, shape 1.
OptimizationResult desirabilityOptimize(const SurfaceFit& fit);

// Fixed multiple-linear-regression estimate of the quality score from the
// three retained factors.
double predictQualityEquation(double pigmentFastness,
                              double machineProductivity, double pileWeight);

}  // namespace qual
