#include "qual/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qual/errors.hpp"
#include "qual/random.hpp"

namespace qual {

const char* roleName(Role role) {
  switch (role) {
    case Role::Input: return "input";
    case Role::Response: return "response";
    case Role::Ignored: return "ignored";
  }
  return "?";
}

Role roleFromName(const std::string& name) {
  if (name == "input") return Role::Input;
  if (name == "response") return Role::Response;
  if (name == "ignored") return Role::Ignored;
  throw SchemaError("unknown column role '" + name + "'");
}

bool Column::hasMissing() const {
  return std::find(missing.begin(), missing.end(), true) != missing.end();
}

Eigen::Index Column::missingCount() const {
  return static_cast<Eigen::Index>(
      std::count(missing.begin(), missing.end(), true));
}

std::optional<std::size_t> Dataset::columnIndex(
    const std::string& columnName) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == columnName) return i;
  }
  return std::nullopt;
}

const Column& Dataset::column(const std::string& columnName) const {
  const auto idx = columnIndex(columnName);
  if (!idx) throw SchemaError("no column named '" + columnName + "'");
  return columns[*idx];
}

std::vector<std::size_t> Dataset::inputColumnIndices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].role == Role::Input) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> Dataset::responseIndex() const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].role == Role::Response) return i;
  }
  return std::nullopt;
}

bool Dataset::hasMissing() const {
  return std::any_of(columns.begin(), columns.end(),
                     [](const Column& c) { return c.hasMissing(); });
}

void Dataset::validate() const {
  std::set<std::string> seen;
  std::size_t responses = 0;
  for (const Column& c : columns) {
    if (c.rows() != rows()) {
      throw SchemaError("column '" + c.name + "' has " +
                        std::to_string(c.rows()) + " rows, expected " +
                        std::to_string(rows()));
    }
    if (c.values.size() != static_cast<Eigen::Index>(c.missing.size())) {
      throw SchemaError("column '" + c.name +
                        "': values and missing mask differ in length");
    }
    if (!seen.insert(c.name).second) {
      throw SchemaError("duplicate column name '" + c.name + "'");
    }
    if (c.role == Role::Response) ++responses;
  }
  if (responses > 1) {
    throw SchemaError("dataset has " + std::to_string(responses) +
                      " response columns, at most one allowed");
  }
}

Dataset composeQualityScore(const Dataset& d, const QualityScoreSpec& spec) {
  if (spec.components.empty()) {
    throw SpecError("quality score spec has no components");
  }
  if (d.responseIndex()) {
    throw SpecError("dataset already carries a response column");
  }
  if (d.columnIndex(spec.outputName)) {
    throw SpecError("output column '" + spec.outputName + "' already exists");
  }

  double totalWeight = 0.0;
  for (const auto& comp : spec.components) {
    if (comp.weight < 0.0) {
      throw SpecError("negative weight for component '" + comp.column + "'");
    }
    totalWeight += comp.weight;
  }
  if (totalWeight <= 0.0) {
    throw SpecError("component weights sum to zero");
  }

  Eigen::VectorXd score = Eigen::VectorXd::Zero(d.rows());
  for (const auto& comp : spec.components) {
    const auto idx = d.columnIndex(comp.column);
    if (!idx) throw SpecError("component column '" + comp.column + "' not found");
    const Column& col = d.columns[*idx];
    if (col.role != Role::Input) {
      throw SpecError("component column '" + comp.column + "' is not an input");
    }
    if (col.hasMissing()) {
      throw SpecError("component column '" + comp.column + "' is not imputed");
    }
    for (Eigen::Index r = 0; r < col.rows(); ++r) {
      const double v = col.values[r];
      if (v < 0.0 || v > 1.0) {
        throw RangeError("component '" + comp.column + "' row " +
                         std::to_string(r + 1) + " value " +
                         std::to_string(v) + " outside [0, 1]");
      }
    }
    score += (comp.weight / totalWeight) * col.values;
  }

  Dataset out = d;
  Column response;
  response.name = spec.outputName;
  response.role = Role::Response;
  response.values = std::move(score);
  response.missing.assign(static_cast<std::size_t>(d.rows()), false);
  out.columns.push_back(std::move(response));
  return out;
}

namespace {

Dataset takeRows(const Dataset& d, const std::vector<Eigen::Index>& rows,
                 const std::string& suffix) {
  Dataset out;
  out.name = d.name.empty() ? suffix : d.name + "/" + suffix;
  out.columns.reserve(d.columns.size());
  for (const Column& c : d.columns) {
    Column taken;
    taken.name = c.name;
    taken.role = c.role;
    taken.values.resize(static_cast<Eigen::Index>(rows.size()));
    taken.missing.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      taken.values[static_cast<Eigen::Index>(i)] = c.values[rows[i]];
      taken.missing[i] = c.missing[static_cast<std::size_t>(rows[i])];
    }
    out.columns.push_back(std::move(taken));
  }
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> splitTrainTest(const Dataset& d,
                                           double testFraction,
                                           std::uint64_t seed) {
  const Eigen::Index n = d.rows();
  if (n < 2) throw SplitError("need at least two rows to split");
  if (!(testFraction > 0.0 && testFraction < 1.0)) {
    throw SplitError("test fraction must lie in (0, 1)");
  }
  Eigen::Index testSize = static_cast<Eigen::Index>(
      std::llround(testFraction * static_cast<double>(n)));
  testSize = std::clamp<Eigen::Index>(testSize, 1, n - 1);

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Rng rng = Rng::stream(seed, 0);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(
        rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(j)]);
  }

  std::vector<Eigen::Index> testRows(perm.begin(),
                                     perm.begin() + testSize);
  std::vector<Eigen::Index> trainRows(perm.begin() + testSize, perm.end());
  std::sort(testRows.begin(), testRows.end());
  std::sort(trainRows.begin(), trainRows.end());
  return {takeRows(d, trainRows, "train"), takeRows(d, testRows, "test")};
}

ModelInput toModelInput(const Dataset& d) {
  const auto respIdx = d.responseIndex();
  if (!respIdx) throw FitError("dataset has no response column");
  const Column& response = d.columns[*respIdx];
  if (response.hasMissing()) {
    throw FitError("response column '" + response.name + "' has missing values");
  }

  const auto inputs = d.inputColumnIndices();
  ModelInput out;
  out.features.resize(d.rows(), static_cast<Eigen::Index>(inputs.size()));
  out.featureNames.reserve(inputs.size());
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    const Column& col = d.columns[inputs[j]];
    if (col.hasMissing()) {
      throw FitError("input column '" + col.name + "' has missing values");
    }
    out.features.col(static_cast<Eigen::Index>(j)) = col.values;
    out.featureNames.push_back(col.name);
  }
  out.response = response.values;
  return out;
}

}  // namespace qual
