#pragma once

#include <string>
#include <vector>

#include "qual/dataset.hpp"
#include "qual/random.hpp"

namespace qual::test {

inline Column makeColumn(const std::string& name, Role role,
                         std::vector<double> values,
                         std::vector<bool> missing = {}) {
  Column col;
  col.name = name;
  col.role = role;
  col.values = Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  if (missing.empty()) missing.assign(values.size(), false);
  col.missing = std::move(missing);
  return col;
}

inline Dataset makeDataset(std::vector<Column> columns,
                           const std::string& name = "test") {
  Dataset d;
  d.name = name;
  d.columns = std::move(columns);
  d.validate();
  return d;
}

// y = x1 (+ optional noise), x2..xp pure noise features.
inline ModelInput signalInput(int rows, int features, double noiseSd,
                              std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 900);
  ModelInput input;
  input.features.resize(rows, features);
  input.response.resize(rows);
  for (int j = 0; j < features; ++j) {
    input.featureNames.push_back("x" + std::to_string(j + 1));
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < features; ++j) {
      input.features(i, j) = rng.uniform();
    }
    input.response[i] = input.features(i, 0);
    if (noiseSd > 0.0) input.response[i] += noiseSd * rng.normal();
  }
  return input;
}

}  // namespace qual::test
