#include "qual/doe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include "qual/csv.hpp"
#include "qual/distributions.hpp"
#include "qual/errors.hpp"
#include "text_util.hpp"

namespace qual {

Factor Factor::fromRange(const std::string& name, double low, double high) {
  Factor f;
  f.name = name;
  f.low = low;
  f.center = 0.5 * (low + high);
  f.high = high;
  return f;
}

void validateFactor(const Factor& f) {
  if (!(f.low < f.center && f.center < f.high)) {
    throw DesignError("factor '" + f.name +
                      "' needs low < center < high");
  }
  const double mid = 0.5 * (f.low + f.high);
  const double scale = std::max({std::fabs(mid), f.high - f.low, 1.0});
  if (std::fabs(f.center - mid) > 1e-9 * scale) {
    throw DesignError("factor '" + f.name +
                      "' center is not the midpoint of its range");
  }
}

double toCoded(const Factor& f, double natural) {
  return (natural - f.center) / (0.5 * (f.high - f.low));
}

double fromCoded(const Factor& f, double coded) {
  // exact at the three design levels so generated runs echo the factor
  // table bit for bit
  if (coded == -1.0) return f.low;
  if (coded == 0.0) return f.center;
  if (coded == 1.0) return f.high;
  return f.center + coded * 0.5 * (f.high - f.low);
}

int ExperimentDesign::blockCount() const {
  int maxBlock = 0;
  for (const auto& run : runs) maxBlock = std::max(maxBlock, run.block);
  return maxBlock;
}

namespace {

DesignRun makeRun(const std::vector<Factor>& factors, int block,
                  std::vector<double> coded) {
  DesignRun run;
  run.block = block;
  run.natural.reserve(coded.size());
  for (std::size_t i = 0; i < coded.size(); ++i) {
    run.natural.push_back(fromCoded(factors[i], coded[i]));
  }
  run.coded = std::move(coded);
  return run;
}

}  // namespace

ExperimentDesign buildCcfDesign(const std::vector<Factor>& factors,
                                int nCenter) {
  if (factors.size() != 3) {
    throw DesignError("only the 3-factor face-centered layout is supported");
  }
  if (nCenter < 0) throw DesignError("center run count must be nonnegative");
  for (const auto& f : factors) validateFactor(f);
  {
    std::set<std::string> names;
    for (const auto& f : factors) {
      if (!names.insert(f.name).second) {
        throw DesignError("duplicate factor name '" + f.name + "'");
      }
    }
  }

  ExperimentDesign design;
  design.factors = factors;
  design.nCenter = nCenter;

  std::vector<DesignRun> negCorners;
  std::vector<DesignRun> posCorners;
  for (double s1 : {-1.0, 1.0}) {
    for (double s2 : {-1.0, 1.0}) {
      for (double s3 : {-1.0, 1.0}) {
        const bool negative = s1 * s2 * s3 < 0.0;
        auto& bucket = negative ? negCorners : posCorners;
        bucket.push_back(makeRun(factors, negative ? 1 : 2, {s1, s2, s3}));
      }
    }
  }

  std::vector<int> centersPerBlock(3, 0);
  for (int c = 0; c < nCenter; ++c) ++centersPerBlock[c % 3];
  const auto appendCenters = [&](int block) {
    for (int c = 0; c < centersPerBlock[static_cast<std::size_t>(block - 1)];
         ++c) {
      design.runs.push_back(makeRun(factors, block, {0.0, 0.0, 0.0}));
    }
  };

  for (auto& run : negCorners) design.runs.push_back(std::move(run));
  appendCenters(1);
  for (auto& run : posCorners) design.runs.push_back(std::move(run));
  appendCenters(2);
  for (std::size_t f = 0; f < 3; ++f) {
    for (double level : {-1.0, 1.0}) {
      std::vector<double> coded(3, 0.0);
      coded[f] = level;
      design.runs.push_back(makeRun(factors, 3, std::move(coded)));
    }
  }
  appendCenters(3);

  for (std::size_t i = 0; i < design.runs.size(); ++i) {
    design.runs[i].standardOrder = static_cast<int>(i) + 1;
  }
  return design;
}

void writeDesignCsv(const ExperimentDesign& design,
                    const Eigen::VectorXd* responses, std::ostream& out,
                    const std::string& responseName) {
  if (responses &&
      responses->size() != static_cast<Eigen::Index>(design.runs.size())) {
    throw DesignError("response count does not match run count");
  }
  out << "standard_order,block";
  for (const auto& f : design.factors) out << ',' << f.name;
  if (responses) out << ',' << responseName;
  out << '\n';
  for (std::size_t i = 0; i < design.runs.size(); ++i) {
    const DesignRun& run = design.runs[i];
    out << run.standardOrder << ',' << run.block;
    for (double v : run.natural) out << ',' << detail::formatShortest(v);
    if (responses) {
      out << ',' << detail::formatShortest((*responses)[static_cast<Eigen::Index>(i)]);
    }
    out << '\n';
  }
}

void writeDesignCsvFile(const ExperimentDesign& design,
                        const Eigen::VectorXd* responses,
                        const std::filesystem::path& path,
                        const std::string& responseName) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  writeDesignCsv(design, responses, out, responseName);
}

DesignTable readDesignCsv(std::istream& in) {
  CsvSchema schema;
  schema.defaultRole = Role::Input;
  const Dataset table = loadTable(in, schema, "design");
  if (table.cols() != 5 && table.cols() != 6) {
    throw DesignError(
        "design file needs standard_order, block, three factor columns and "
        "an optional response column");
  }
  if (table.columns[0].name != "standard_order" ||
      table.columns[1].name != "block") {
    throw DesignError(
        "design file must start with 'standard_order,block' columns");
  }
  if (table.hasMissing()) {
    throw DesignError("design file has missing cells");
  }
  const bool hasResponse = table.cols() == 6;
  const Eigen::Index n = table.rows();
  if (n == 0) throw DesignError("design file has no runs");

  DesignTable result;
  for (int j = 2; j < 5; ++j) {
    const Column& col = table.columns[static_cast<std::size_t>(j)];
    std::set<double> levels(col.values.begin(), col.values.end());
    if (levels.size() != 3) {
      throw DesignError("factor column '" + col.name + "' has " +
                        std::to_string(levels.size()) +
                        " distinct levels, expected 3");
    }
    auto it = levels.begin();
    Factor f;
    f.name = col.name;
    f.low = *it++;
    f.center = *it++;
    f.high = *it;
    validateFactor(f);
    result.design.factors.push_back(f);
  }

  std::vector<std::pair<DesignRun, double>> rows;
  std::set<int> seenOrders;
  for (Eigen::Index r = 0; r < n; ++r) {
    DesignRun run;
    const double rawOrder = table.columns[0].values[r];
    const double rawBlock = table.columns[1].values[r];
    run.standardOrder = static_cast<int>(rawOrder);
    run.block = static_cast<int>(rawBlock);
    if (run.standardOrder != rawOrder || run.block != rawBlock ||
        run.block < 1) {
      throw DesignError("run " + std::to_string(r + 1) +
                        ": standard_order and block must be positive integers");
    }
    if (!seenOrders.insert(run.standardOrder).second) {
      throw DesignError("duplicate standard order " +
                        std::to_string(run.standardOrder));
    }
    for (int j = 0; j < 3; ++j) {
      const Factor& f = result.design.factors[static_cast<std::size_t>(j)];
      const double v = table.columns[static_cast<std::size_t>(j + 2)].values[r];
      double coded = 0.0;
      if (v == f.low) {
        coded = -1.0;
      } else if (v == f.center) {
        coded = 0.0;
      } else {
        coded = 1.0;
      }
      run.coded.push_back(coded);
      run.natural.push_back(v);
    }
    const double response = hasResponse ? table.columns[5].values[r] : 0.0;
    rows.emplace_back(std::move(run), response);
  }

  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) {
              return a.first.standardOrder < b.first.standardOrder;
            });

  Eigen::VectorXd responses(n);
  int nCenter = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto& [run, response] = rows[static_cast<std::size_t>(i)];
    if (std::all_of(run.coded.begin(), run.coded.end(),
                    [](double c) { return c == 0.0; })) {
      ++nCenter;
    }
    responses[i] = response;
    result.design.runs.push_back(std::move(run));
  }
  result.design.nCenter = nCenter;
  if (hasResponse) {
    result.responses = std::move(responses);
    result.responseName = table.columns[5].name;
  }
  return result;
}

DesignTable readDesignCsvFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return readDesignCsv(in);
}

namespace {

Eigen::Index termCount(std::size_t factorCount, int blockCount) {
  const auto k = static_cast<Eigen::Index>(factorCount);
  return 1 + std::max(0, blockCount - 1) + 2 * k + k * (k - 1) / 2;
}

// One model-matrix row. block 0 means "no block contribution" (prediction).
Eigen::VectorXd modelRow(std::size_t factorCount, int blockCount,
                         std::span<const double> coded, int block) {
  Eigen::VectorXd row(termCount(factorCount, blockCount));
  Eigen::Index pos = 0;
  row[pos++] = 1.0;
  for (int b = 2; b <= blockCount; ++b) {
    double v = 0.0;
    if (block == b) v = 1.0;
    if (block == 1) v = -1.0;
    row[pos++] = v;
  }
  for (std::size_t i = 0; i < factorCount; ++i) {
    row[pos++] = coded[i];
    row[pos++] = coded[i] * coded[i];
  }
  for (std::size_t i = 0; i < factorCount; ++i) {
    for (std::size_t j = i + 1; j < factorCount; ++j) {
      row[pos++] = coded[i] * coded[j];
    }
  }
  return row;
}

std::vector<std::string> termLabels(const std::vector<Factor>& factors,
                                    int blockCount) {
  std::vector<std::string> labels;
  labels.push_back("Mean/Interc.");
  for (int b = 1; b < blockCount; ++b) {
    labels.push_back("Blocks(" + std::to_string(b) + ")");
  }
  for (const auto& f : factors) {
    labels.push_back(f.name + " (L)");
    labels.push_back(f.name + " (Q)");
  }
  for (std::size_t i = 0; i < factors.size(); ++i) {
    for (std::size_t j = i + 1; j < factors.size(); ++j) {
      labels.push_back(std::to_string(i + 1) + "L by " +
                       std::to_string(j + 1) + "L");
    }
  }
  return labels;
}

double residualSsWithoutColumns(const DesignMatrix& full,
                                const Eigen::VectorXd& y,
                                Eigen::Index dropBegin,
                                Eigen::Index dropCount) {
  DesignMatrix reduced;
  const Eigen::Index cols = full.values.cols();
  reduced.values.resize(full.values.rows(), cols - dropCount);
  Eigen::Index out = 0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (j >= dropBegin && j < dropBegin + dropCount) continue;
    reduced.values.col(out) = full.values.col(j);
    reduced.labels.push_back(full.labels[static_cast<std::size_t>(j)]);
    ++out;
  }
  return solveLeastSquares(reduced, y).residuals.squaredNorm();
}

}  // namespace

SurfaceFit fitResponseSurface(const ExperimentDesign& design,
                              const Eigen::VectorXd& responses) {
  const auto n = static_cast<Eigen::Index>(design.runs.size());
  if (n == 0) throw DesignError("design has no runs");
  if (responses.size() != n) {
    throw DesignError("expected " + std::to_string(n) + " responses, got " +
                      std::to_string(responses.size()));
  }
  const int blockCount = design.blockCount();
  const std::size_t k = design.factors.size();

  DesignMatrix matrix;
  matrix.labels = termLabels(design.factors, blockCount);
  matrix.values.resize(n, termCount(k, blockCount));
  for (Eigen::Index i = 0; i < n; ++i) {
    const DesignRun& run = design.runs[static_cast<std::size_t>(i)];
    matrix.values.row(i) = modelRow(k, blockCount, run.coded, run.block);
  }

  SurfaceFit fit;
  fit.design = design;
  fit.responses = responses;
  fit.solution = solveLeastSquares(matrix, responses);
  fit.residualDf = fit.solution.residualDf;
  fit.errorMs = fit.solution.sigma2;
  fit.totalSs = (responses.array() - responses.mean()).square().sum();

  const Eigen::Index terms = matrix.values.cols();
  const double df = static_cast<double>(fit.residualDf);
  for (Eigen::Index j = 0; j < terms; ++j) {
    EffectRow row;
    row.term = matrix.labels[static_cast<std::size_t>(j)];
    const double coef = fit.solution.coefficients[j];
    const double seCoef =
        std::sqrt(fit.solution.sigma2 * fit.solution.covarianceScale[j]);
    const double scale = j == 0 ? 1.0 : 2.0;
    row.effect = scale * coef;
    row.standardError = scale * seCoef;
    if (seCoef > 0.0) {
      row.t = coef / seCoef;
      row.p = fit.residualDf > 0 ? tTwoSidedP(row.t, df) : 1.0;
    } else {
      row.t = coef == 0.0 ? 0.0
                          : std::copysign(
                                std::numeric_limits<double>::infinity(), coef);
      row.p = coef == 0.0 ? 1.0 : 0.0;
    }
    fit.effects.push_back(std::move(row));
  }

  // drop-one (partial) sums of squares
  const double rssFull = fit.solution.residuals.squaredNorm();
  const Eigen::Index blockCols = std::max(0, blockCount - 1);
  if (blockCols > 0) {
    AnovaRow row;
    row.term = "Blocks";
    row.ss = std::max(
        0.0, residualSsWithoutColumns(matrix, responses, 1, blockCols) -
                 rssFull);
    row.df = static_cast<int>(blockCols);
    row.ms = row.ss / row.df;
    if (fit.errorMs > 0.0 && fit.residualDf > 0) {
      row.f = *row.ms / fit.errorMs;
      row.p = fUpperP(*row.f, row.df, df);
    }
    fit.anova.push_back(std::move(row));
  }
  for (Eigen::Index j = 1 + blockCols; j < terms; ++j) {
    AnovaRow row;
    row.term = matrix.labels[static_cast<std::size_t>(j)];
    row.ss = std::max(
        0.0, residualSsWithoutColumns(matrix, responses, j, 1) - rssFull);
    row.df = 1;
    row.ms = row.ss;
    if (fit.errorMs > 0.0 && fit.residualDf > 0) {
      row.f = row.ss / fit.errorMs;
      row.p = fUpperP(*row.f, 1.0, df);
    }
    fit.anova.push_back(std::move(row));
  }
  {
    AnovaRow error;
    error.term = "Error";
    error.ss = rssFull;
    error.df = static_cast<int>(fit.residualDf);
    if (fit.residualDf > 0) error.ms = fit.errorMs;
    fit.anova.push_back(std::move(error));

    AnovaRow total;
    total.term = "Total SS";
    total.ss = fit.totalSs;
    total.df = static_cast<int>(n - 1);
    fit.anova.push_back(std::move(total));
  }
  return fit;
}

namespace {

double predictCoded(const SurfaceFit& fit, std::span<const double> coded) {
  const Eigen::VectorXd row =
      modelRow(fit.design.factors.size(), fit.design.blockCount(), coded,
               /*block=*/0);
  return row.dot(fit.solution.coefficients);
}

}  // namespace

SurfacePrediction predictSurface(const SurfaceFit& fit,
                                 std::span<const double> naturalLevels) {
  const std::size_t k = fit.design.factors.size();
  if (naturalLevels.size() != k) {
    throw DesignError("expected " + std::to_string(k) + " factor levels");
  }
  std::vector<double> coded(k);
  bool extrapolated = false;
  for (std::size_t i = 0; i < k; ++i) {
    coded[i] = toCoded(fit.design.factors[i], naturalLevels[i]);
    if (std::fabs(coded[i]) > 1.0 + 1e-9) extrapolated = true;
  }
  return {predictCoded(fit, coded), extrapolated};
}

double desirability(double predicted, const DesirabilitySpec& spec) {
  if (!(spec.lo < spec.hi)) {
    throw SpecError("desirability needs lo < hi");
  }
  if (!(spec.shape > 0.0)) {
    throw SpecError("desirability shape must be positive");
  }
  if (predicted <= spec.lo) return 0.0;
  if (predicted >= spec.hi) return 1.0;
  return std::pow((predicted - spec.lo) / (spec.hi - spec.lo), spec.shape);
}

OptimizationResult desirabilityOptimize(const SurfaceFit& fit,
                                        const DesirabilitySpec& spec,
                                        int gridPoints) {
  if (gridPoints < 2) throw SpecError("grid needs at least two points");
  // validate the spec up front
  (void)desirability(spec.lo, spec);

  const std::size_t k = fit.design.factors.size();
  struct Score {
    double d = -1.0;
    double predicted = -std::numeric_limits<double>::infinity();
  };
  const auto evaluate = [&](std::span<const double> coded) {
    Score s;
    s.predicted = predictCoded(fit, coded);
    s.d = desirability(s.predicted, spec);
    return s;
  };
  const auto better = [](const Score& a, const Score& b) {
    if (a.d != b.d) return a.d > b.d;
    return a.predicted > b.predicted;
  };

  std::vector<double> best(k, 0.0);
  std::vector<double> point(k, 0.0);
  std::vector<int> idx(k, 0);
  Score bestScore = evaluate(best);
  const double step0 = 2.0 / (gridPoints - 1);
  for (;;) {
    for (std::size_t i = 0; i < k; ++i) point[i] = -1.0 + idx[i] * step0;
    const Score s = evaluate(point);
    if (better(s, bestScore)) {
      bestScore = s;
      best = point;
    }
    std::size_t dim = 0;
    while (dim < k && ++idx[dim] == gridPoints) {
      idx[dim] = 0;
      ++dim;
    }
    if (dim == k) break;
  }

  // coordinate refinement around the grid winner
  double step = step0;
  while (step > 1e-10) {
    bool improved = false;
    for (std::size_t dim = 0; dim < k; ++dim) {
      for (double dir : {-1.0, 1.0}) {
        point = best;
        point[dim] = std::clamp(point[dim] + dir * step, -1.0, 1.0);
        const Score s = evaluate(point);
        if (better(s, bestScore)) {
          bestScore = s;
          best = point;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  OptimizationResult result;
  result.codedLevels = best;
  result.naturalLevels.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    result.naturalLevels.push_back(fromCoded(fit.design.factors[i], best[i]));
  }
  result.desirability = bestScore.d;
  result.predictedResponse = bestScore.predicted;
  return result;
}

OptimizationResult desirabilityOptimize(const SurfaceFit& fit) {
  DesirabilitySpec spec;
  spec.lo = fit.responses.minCoeff();
  spec.hi = fit.responses.maxCoeff();
  spec.shape = 1.0;
  return desirabilityOptimize(fit, spec);
}

double predictQualityEquation(double pigmentFastness,
                              double machineProductivity, double pileWeight) {
  return 0.896502 + 0.067231 * pigmentFastness -
         0.1482945 * machineProductivity + 0.000005 * pileWeight;
}

}  // namespace qual
