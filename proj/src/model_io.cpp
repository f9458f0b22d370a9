#include "qual/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "qual/errors.hpp"

namespace qual {
namespace {

constexpr int kFormatVersion = 1;

using Json = nlohmann::ordered_json;

void flattenTree(const TreeNode& node, Json& nodes) {
  // depth-first; children are appended after their parent and referenced
  // by index
  const auto selfIndex = nodes.size();
  Json entry;
  entry["value"] = node.value;
  entry["rows"] = node.rows;
  if (!node.isLeaf()) {
    entry["split_variable"] = node.splitVariable;
    entry["threshold"] = node.threshold;
    entry["gain"] = node.gain;
  }
  nodes.push_back(std::move(entry));
  if (!node.isLeaf()) {
    nodes[selfIndex]["left"] = nodes.size();
    flattenTree(*node.left, nodes);
    nodes[selfIndex]["right"] = nodes.size();
    flattenTree(*node.right, nodes);
  }
}

Json treeToJson(const TreeNode& root) {
  Json nodes = Json::array();
  flattenTree(root, nodes);
  return nodes;
}

std::unique_ptr<TreeNode> nodeFromJson(const Json& nodes, std::size_t index) {
  if (index >= nodes.size()) {
    throw IoError("model file: node index out of range");
  }
  const Json& entry = nodes[index];
  auto node = std::make_unique<TreeNode>();
  node->value = entry.at("value").get<double>();
  node->rows = entry.at("rows").get<std::int64_t>();
  if (entry.contains("split_variable")) {
    node->splitVariable = entry.at("split_variable").get<int>();
    node->threshold = entry.at("threshold").get<double>();
    node->gain = entry.at("gain").get<double>();
    node->left = nodeFromJson(nodes, entry.at("left").get<std::size_t>());
    node->right = nodeFromJson(nodes, entry.at("right").get<std::size_t>());
  }
  return node;
}

Json configToJson(const TrainConfig& c) {
  Json j;
  j["n_trees"] = c.nTrees;
  j["max_leaf_nodes"] = c.maxLeafNodes;
  j["min_rows_per_leaf"] = c.minRowsPerLeaf;
  j["mtry"] = c.mtry;
  j["subsample_fraction"] = c.subsampleFraction;
  j["learn_rate"] = c.learnRate;
  j["seed"] = c.seed;
  j["with_replacement"] = c.withReplacement;
  j["k_best_splits"] = c.kBestSplits;
  return j;
}

TrainConfig configFromJson(const Json& j) {
  TrainConfig c;
  c.nTrees = j.at("n_trees").get<int>();
  c.maxLeafNodes = j.at("max_leaf_nodes").get<int>();
  c.minRowsPerLeaf = j.at("min_rows_per_leaf").get<int>();
  c.mtry = j.at("mtry").get<int>();
  c.subsampleFraction = j.at("subsample_fraction").get<double>();
  c.learnRate = j.at("learn_rate").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.withReplacement = j.at("with_replacement").get<bool>();
  c.kBestSplits = j.at("k_best_splits").get<int>();
  return c;
}

Json parseModelFile(std::istream& in, const std::string& expectedKind) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (j.value("format_version", 0) != kFormatVersion) {
    throw IoError("unsupported model format version");
  }
  if (j.value("kind", "") != expectedKind) {
    throw IoError("model file holds '" + j.value("kind", std::string("?")) +
                  "', expected '" + expectedKind + "'");
  }
  return j;
}

}  // namespace

void saveModel(const ForestModel& model, std::ostream& out) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "random_forest";
  j["feature_names"] = model.featureNames;
  j["config"] = configToJson(model.config);
  Json trees = Json::array();
  for (const auto& tree : model.trees) trees.push_back(treeToJson(*tree));
  j["trees"] = std::move(trees);
  j["oob_indices"] = model.oobIndices;
  out << j.dump(1, '\t') << '\n';
}

void saveModel(const BoostedModel& model, std::ostream& out) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "boosted_tree";
  j["feature_names"] = model.featureNames;
  j["config"] = configToJson(model.config);
  j["initial_value"] = model.initialValue;
  j["learn_rate"] = model.learnRate;
  Json stages = Json::array();
  for (const auto& stage : model.stages) {
    Json s;
    s["scale"] = stage.scale;
    s["tree"] = treeToJson(*stage.tree);
    stages.push_back(std::move(s));
  }
  j["stages"] = std::move(stages);
  out << j.dump(1, '\t') << '\n';
}

ForestModel loadForestModel(std::istream& in) {
  const Json j = parseModelFile(in, "random_forest");
  ForestModel model;
  model.featureNames = j.at("feature_names").get<std::vector<std::string>>();
  model.config = configFromJson(j.at("config"));
  for (const Json& tree : j.at("trees")) {
    model.trees.push_back(nodeFromJson(tree, 0));
  }
  model.oobIndices =
      j.at("oob_indices").get<std::vector<std::vector<int>>>();
  if (model.trees.empty()) throw IoError("model file holds no trees");
  if (model.oobIndices.size() != model.trees.size()) {
    throw IoError("model file: tree and out-of-bag counts differ");
  }
  return model;
}

BoostedModel loadBoostedModel(std::istream& in) {
  const Json j = parseModelFile(in, "boosted_tree");
  BoostedModel model;
  model.featureNames = j.at("feature_names").get<std::vector<std::string>>();
  model.config = configFromJson(j.at("config"));
  model.initialValue = j.at("initial_value").get<double>();
  model.learnRate = j.at("learn_rate").get<double>();
  for (const Json& stage : j.at("stages")) {
    BoostedStage s;
    s.scale = stage.at("scale").get<double>();
    s.tree = nodeFromJson(stage.at("tree"), 0);
    model.stages.push_back(std::move(s));
  }
  return model;
}

void saveModelFile(const ForestModel& model,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  saveModel(model, out);
}

void saveModelFile(const BoostedModel& model,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  saveModel(model, out);
}

ForestModel loadForestModelFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return loadForestModel(in);
}

BoostedModel loadBoostedModelFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return loadBoostedModel(in);
}

}  // namespace qual
