#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qual {

enum class Role { Input, Response, Ignored };

const char* roleName(Role role);
Role roleFromName(const std::string& name);  // throws SchemaError

// One named variable. Masked entries hold NaN and must never feed a
// downstream computation; imputation clears the mask.
struct Column {
  std::string name;
  Role role = Role::Input;
  Eigen::VectorXd values;
  std::vector<bool> missing;

  Eigen::Index rows() const { return values.size(); }
  bool hasMissing() const;
  Eigen::Index missingCount() const;
};

// Columnar table. Treated as immutable after construction: every operation
// returns a new dataset, so sharing across readers is safe.
struct Dataset {
  std::string name;
  std::vector<Column> columns;

  Eigen::Index rows() const {
    return columns.empty() ? 0 : columns.front().rows();
  }
  Eigen::Index cols() const {
    return static_cast<Eigen::Index>(columns.size());
  }

  std::optional<std::size_t> columnIndex(const std::string& columnName) const;
  const Column& column(const std::string& columnName) const;  // throws SchemaError
  std::vector<std::size_t> inputColumnIndices() const;
  std::optional<std::size_t> responseIndex() const;
  bool hasMissing() const;

  // Enforces: equal column lengths, unique names, at most one response.
  void validate() const;
};

// Weighted combination of [0,1]-scaled input columns into a response.
struct QualityScoreSpec {
  struct Component {
    std::string column;
    double weight = 1.0;
  };
  std::vector<Component> components;
  std::string outputName = "Quality score";
};

// Appends the weighted-mean response column. Weights are normalized to sum
// to one; components keep their input role.
Dataset composeQualityScore(const Dataset& d, const QualityScoreSpec& spec);

// Deterministic disjoint partition. Test size = round(fraction * rows),
// clamped to [1, rows - 1]. Row order within each part is preserved.
std::pair<Dataset, Dataset> splitTrainTest(const Dataset& d,
                                           double testFraction,
                                           std::uint64_t seed);

// Dense view consumed by the model fitters.
struct ModelInput {
  Eigen::MatrixXd features;  // rows x inputs, dataset column order
  Eigen::VectorXd response;
  std::vector<std::string> featureNames;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index featureCount() const { return features.cols(); }
};

// Requires a fully imputed response and input columns.
ModelInput toModelInput(const Dataset& d);

}  // namespace qual
