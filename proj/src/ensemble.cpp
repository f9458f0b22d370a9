#include "qual/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "qual/errors.hpp"
#include "qual/random.hpp"
#include "tree_grow.hpp"

namespace qual {
namespace {

void validateTrainInput(const ModelInput& train, const TrainConfig& config) {
  if (train.rows() == 0) throw FitError("cannot fit on an empty dataset");
  const int minRows = std::max(1, config.minRowsPerLeaf);
  if (train.rows() < 2 * minRows) {
    throw FitError("need at least " + std::to_string(2 * minRows) + " rows");
  }
  if (!train.response.allFinite()) {
    throw FitError("response contains non-finite values");
  }
  if (train.featureCount() > 0 && !train.features.allFinite()) {
    throw FitError("features contain non-finite values");
  }
}

int resolveMtry(const TrainConfig& config, int p) {
  if (config.mtry == 0) {
    return std::max(1, static_cast<int>(std::ceil(p / 3.0)));
  }
  if (config.mtry < 1 || config.mtry > p) {
    throw FitError("mtry must lie in [1, " + std::to_string(p) + "]");
  }
  return config.mtry;
}

int resolveThreads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs job(i) for i in [0, count), split across threads in contiguous
// chunks. Results must be written into per-index slots by the job itself.
template <typename Job>
void parallelFor(int count, int nThreads, Job&& job) {
  nThreads = std::min(nThreads, count);
  if (nThreads <= 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(nThreads));
  for (int t = 0; t < nThreads; ++t) {
    const int begin = static_cast<int>(
        static_cast<long long>(count) * t / nThreads);
    const int end = static_cast<int>(
        static_cast<long long>(count) * (t + 1) / nThreads);
    workers.emplace_back([&job, begin, end] {
      for (int i = begin; i < end; ++i) job(i);
    });
  }
  for (auto& w : workers) w.join();
}

void accumulateGains(const TreeNode& node, std::vector<double>& gains) {
  if (node.isLeaf()) return;
  gains[static_cast<std::size_t>(node.splitVariable)] += node.gain;
  accumulateGains(*node.left, gains);
  accumulateGains(*node.right, gains);
}

ImportanceRanking rankingFromGains(const std::vector<double>& gains,
                                   const std::vector<std::string>& names) {
  ImportanceRanking ranking;
  ranking.entries.reserve(names.size());
  double maxGain = 0.0;
  for (double g : gains) maxGain = std::max(maxGain, g);
  for (std::size_t j = 0; j < names.size(); ++j) {
    const double score = maxGain > 0.0 ? 100.0 * gains[j] / maxGain : 0.0;
    ranking.entries.push_back({names[j], score});
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const ImportanceEntry& a, const ImportanceEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.variable < b.variable;
            });
  return ranking;
}

}  // namespace

ForestModel fitRandomForest(const ModelInput& train,
                            const TrainConfig& config) {
  validateTrainInput(train, config);
  if (config.nTrees < 1) throw FitError("forest needs at least one tree");
  if (train.featureCount() == 0) {
    throw FitError("forest needs at least one input variable");
  }
  if (!config.withReplacement &&
      !(config.subsampleFraction > 0.0 && config.subsampleFraction <= 1.0)) {
    throw FitError("subsample fraction must lie in (0, 1]");
  }

  const int n = static_cast<int>(train.rows());
  const int p = static_cast<int>(train.featureCount());
  const int mtry = resolveMtry(config, p);
  const int minRows = std::max(1, config.minRowsPerLeaf);
  const auto order = detail::sortFeatureOrders(train.features);
  const auto nameRank = detail::featureNameRanks(train.featureNames);

  ForestModel model;
  model.featureNames = train.featureNames;
  model.config = config;
  model.trees.resize(static_cast<std::size_t>(config.nTrees));
  model.oobIndices.resize(static_cast<std::size_t>(config.nTrees));

  parallelFor(config.nTrees, resolveThreads(config.nThreads), [&](int t) {
    Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(t));
    std::vector<std::int64_t> count(static_cast<std::size_t>(n), 0);
    if (config.withReplacement) {
      for (int i = 0; i < n; ++i) {
        ++count[rng.below(static_cast<std::uint64_t>(n))];
      }
    } else {
      const int m = std::clamp(
          static_cast<int>(std::llround(config.subsampleFraction * n)), 1, n);
      std::vector<int> rows(static_cast<std::size_t>(n));
      std::iota(rows.begin(), rows.end(), 0);
      for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(
                              rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(rows[static_cast<std::size_t>(i)],
                  rows[static_cast<std::size_t>(j)]);
      }
      for (int i = 0; i < m; ++i) {
        count[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] = 1;
      }
    }
    std::vector<double> weight(count.size());
    for (std::size_t i = 0; i < count.size(); ++i) {
      weight[i] = static_cast<double>(count[i]);
    }

    detail::GrowContext ctx{train.features, train.response, order,
                            weight,         count,          nameRank,
                            config.maxLeafNodes, minRows,
                            mtry,            config.kBestSplits, &rng};
    model.trees[static_cast<std::size_t>(t)] = detail::growTree(ctx);

    auto& oob = model.oobIndices[static_cast<std::size_t>(t)];
    for (int i = 0; i < n; ++i) {
      if (count[static_cast<std::size_t>(i)] == 0) oob.push_back(i);
    }
  });
  return model;
}

BoostedModel fitBoostedTrees(const ModelInput& train,
                             const TrainConfig& config) {
  validateTrainInput(train, config);
  if (config.nTrees < 0) throw FitError("stage count must be nonnegative");
  if (!(config.learnRate > 0.0 && config.learnRate <= 1.0)) {
    throw FitError("learn rate must lie in (0, 1]");
  }
  if (!(config.subsampleFraction > 0.0 && config.subsampleFraction <= 1.0)) {
    throw FitError("subsample fraction must lie in (0, 1]");
  }
  if (config.maxLeafNodes == 1) {
    throw FitError("max leaf nodes must be at least 2 (or 0 for unlimited)");
  }
  if (config.nTrees > 0 && train.featureCount() == 0) {
    throw FitError("boosting needs at least one input variable");
  }

  const int n = static_cast<int>(train.rows());
  const int minRows = std::max(1, config.minRowsPerLeaf);
  const auto order = detail::sortFeatureOrders(train.features);
  const auto nameRank = detail::featureNameRanks(train.featureNames);

  BoostedModel model;
  model.featureNames = train.featureNames;
  model.config = config;
  model.learnRate = config.learnRate;
  model.initialValue = train.response.mean();
  model.stages.reserve(static_cast<std::size_t>(config.nTrees));

  Eigen::VectorXd residual =
      train.response.array() - model.initialValue;
  std::vector<std::int64_t> count(static_cast<std::size_t>(n), 1);
  std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
  std::vector<int> rows(static_cast<std::size_t>(n));

  for (int k = 0; k < config.nTrees; ++k) {
    Rng rng = Rng::stream(config.seed, static_cast<std::uint64_t>(k));
    if (config.subsampleFraction < 1.0) {
      const int m = std::clamp(
          static_cast<int>(std::llround(config.subsampleFraction * n)), 1, n);
      std::iota(rows.begin(), rows.end(), 0);
      for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(
                              rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(rows[static_cast<std::size_t>(i)],
                  rows[static_cast<std::size_t>(j)]);
      }
      std::fill(count.begin(), count.end(), 0);
      for (int i = 0; i < m; ++i) {
        count[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] = 1;
      }
      for (std::size_t i = 0; i < count.size(); ++i) {
        weight[i] = static_cast<double>(count[i]);
      }
    }

    detail::GrowContext ctx{train.features, residual, order,
                            weight,         count,    nameRank,
                            config.maxLeafNodes, minRows,
                            /*mtry=*/0,      config.kBestSplits, &rng};
    BoostedStage stage;
    stage.tree = detail::growTree(ctx);
    for (int i = 0; i < n; ++i) {
      residual[i] -=
          config.learnRate * predictRow(*stage.tree, train.features.row(i));
    }
    model.stages.push_back(std::move(stage));
  }
  return model;
}

double predictRow(const ForestModel& model,
                  const Eigen::Ref<const Eigen::VectorXd>& row) {
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += predictRow(*tree, row);
  return sum / static_cast<double>(model.trees.size());
}

double predictRow(const BoostedModel& model,
                  const Eigen::Ref<const Eigen::VectorXd>& row) {
  double sum = 0.0;
  for (const auto& stage : model.stages) {
    sum += stage.scale * predictRow(*stage.tree, row);
  }
  return model.initialValue + model.learnRate * sum;
}

Eigen::VectorXd predictMatrix(const ForestModel& model,
                              const Eigen::MatrixXd& rows) {
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out[i] = predictRow(model, rows.row(i));
  }
  return out;
}

Eigen::VectorXd predictMatrix(const BoostedModel& model,
                              const Eigen::MatrixXd& rows) {
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    out[i] = predictRow(model, rows.row(i));
  }
  return out;
}

double predictModel(const ForestModel& model,
                    const std::map<std::string, double>& row) {
  double sum = 0.0;
  for (const auto& tree : model.trees) {
    sum += predictModel(*tree, model.featureNames, row);
  }
  return sum / static_cast<double>(model.trees.size());
}

double predictModel(const BoostedModel& model,
                    const std::map<std::string, double>& row) {
  double sum = 0.0;
  for (const auto& stage : model.stages) {
    sum += stage.scale * predictModel(*stage.tree, model.featureNames, row);
  }
  return model.initialValue + model.learnRate * sum;
}

std::vector<std::string> ImportanceRanking::variables() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.variable);
  return out;
}

ImportanceRanking ImportanceRanking::truncated(std::size_t k) const {
  ImportanceRanking out;
  out.entries.assign(entries.begin(),
                     entries.begin() + std::min(k, entries.size()));
  return out;
}

ImportanceRanking variableImportance(const ForestModel& model) {
  std::vector<double> gains(model.featureNames.size(), 0.0);
  for (const auto& tree : model.trees) accumulateGains(*tree, gains);
  return rankingFromGains(gains, model.featureNames);
}

ImportanceRanking variableImportance(const BoostedModel& model) {
  std::vector<double> gains(model.featureNames.size(), 0.0);
  for (const auto& stage : model.stages) accumulateGains(*stage.tree, gains);
  return rankingFromGains(gains, model.featureNames);
}

double outOfBagMse(const ForestModel& model, const ModelInput& train) {
  const auto n = train.rows();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  Eigen::VectorXi hits = Eigen::VectorXi::Zero(n);
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    for (int row : model.oobIndices[t]) {
      sum[row] += predictRow(*model.trees[t], train.features.row(row));
      ++hits[row];
    }
  }
  double sse = 0.0;
  Eigen::Index used = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (hits[i] == 0) continue;
    const double err = sum[i] / hits[i] - train.response[i];
    sse += err * err;
    ++used;
  }
  if (used == 0) {
    throw FitError("no out-of-bag rows; train more trees");
  }
  return sse / static_cast<double>(used);
}

}  // namespace qual
