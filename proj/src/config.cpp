#include "qual/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "qual/errors.hpp"

namespace qual {
namespace {

using Json = nlohmann::ordered_json;

void requireKnownKeys(const Json& obj, const std::string& where,
                      const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!known.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T getOr(const Json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& raw) {
  const std::filesystem::path p(raw);
  return p.is_absolute() ? p : base / p;
}

void parseTrainConfig(const Json& obj, const std::string& where,
                      TrainConfig& config, bool boosting) {
  requireKnownKeys(obj, where,
                   {"trees", "stages", "max_leaf_nodes", "min_rows_per_leaf",
                    "mtry", "subsample_fraction", "learn_rate",
                    "with_replacement", "k_best_splits"});
  config.nTrees = getOr(obj, boosting ? "stages" : "trees", config.nTrees);
  config.maxLeafNodes = getOr(obj, "max_leaf_nodes", config.maxLeafNodes);
  config.minRowsPerLeaf = getOr(obj, "min_rows_per_leaf", config.minRowsPerLeaf);
  config.mtry = getOr(obj, "mtry", config.mtry);
  config.subsampleFraction =
      getOr(obj, "subsample_fraction", config.subsampleFraction);
  config.learnRate = getOr(obj, "learn_rate", config.learnRate);
  config.withReplacement =
      getOr(obj, "with_replacement", config.withReplacement);
  config.kBestSplits = getOr(obj, "k_best_splits", config.kBestSplits);
}

Json trainConfigJson(const TrainConfig& c, bool boosting) {
  Json j;
  j[boosting ? "stages" : "trees"] = c.nTrees;
  j["max_leaf_nodes"] = c.maxLeafNodes;
  j["min_rows_per_leaf"] = c.minRowsPerLeaf;
  if (!boosting) {
    j["mtry"] = c.mtry;
    j["with_replacement"] = c.withReplacement;
  }
  if (boosting) {
    j["subsample_fraction"] = c.subsampleFraction;
    j["learn_rate"] = c.learnRate;
  }
  j["k_best_splits"] = c.kBestSplits;
  return j;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

}  // namespace

PipelineConfig defaultPipelineConfig() {
  PipelineConfig config;
  config.forest.nTrees = 100;
  config.forest.maxLeafNodes = 0;
  config.forest.minRowsPerLeaf = 5;
  config.boosting.nTrees = 500;
  config.boosting.maxLeafNodes = 2;
  config.boosting.minRowsPerLeaf = 5;
  config.boosting.learnRate = 0.1;
  config.boosting.subsampleFraction = 0.5;
  return config;
}

PipelineConfig loadPipelineConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  Json root;
  try {
    root = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");

  requireKnownKeys(root, "config",
                   {"name", "input", "missing_token", "schema", "impute",
                    "quality_score", "split", "seed", "screening", "forest",
                    "boosting", "baselines", "vote", "overrides",
                    "final_count", "doe", "out", "threads"});

  const std::filesystem::path base =
      std::filesystem::absolute(path).parent_path();
  PipelineConfig config = defaultPipelineConfig();

  config.name = getOr<std::string>(root, "name", "dataset");
  if (!root.contains("input")) throw ConfigError("config needs an 'input' path");
  config.input = resolve(base, root.at("input").get<std::string>());
  config.schema.missingToken = getOr<std::string>(root, "missing_token", "");
  config.seed = getOr<std::uint64_t>(root, "seed", 0);
  config.finalCount = getOr(root, "final_count", config.finalCount);
  config.nThreads = getOr(root, "threads", config.nThreads);
  if (root.contains("out")) {
    config.outDir = resolve(base, root.at("out").get<std::string>());
  }

  if (root.contains("schema")) {
    const Json& schema = root.at("schema");
    requireKnownKeys(schema, "schema", {"default_role", "roles"});
    if (schema.contains("default_role")) {
      config.schema.defaultRole =
          roleFromName(schema.at("default_role").get<std::string>());
    }
    if (schema.contains("roles")) {
      for (const auto& [column, role] : schema.at("roles").items()) {
        config.schema.roles[column] = roleFromName(role.get<std::string>());
      }
    }
  } else {
    config.schema.defaultRole = Role::Input;
  }

  if (root.contains("impute")) {
    const Json& impute = root.at("impute");
    requireKnownKeys(impute, "impute", {"strategy", "reference"});
    config.imputeStrategy = imputeStrategyFromName(
        getOr<std::string>(impute, "strategy", "column-mean"));
    if (impute.contains("reference")) {
      config.referencePath =
          resolve(base, impute.at("reference").get<std::string>());
    }
  }

  if (root.contains("quality_score")) {
    const Json& qs = root.at("quality_score");
    requireKnownKeys(qs, "quality_score", {"output", "components"});
    QualityScoreSpec spec;
    spec.outputName = getOr<std::string>(qs, "output", "Quality score");
    if (!qs.contains("components")) {
      throw ConfigError("quality_score needs 'components'");
    }
    for (const Json& comp : qs.at("components")) {
      requireKnownKeys(comp, "quality_score component", {"column", "weight"});
      QualityScoreSpec::Component c;
      c.column = comp.at("column").get<std::string>();
      c.weight = getOr(comp, "weight", 1.0);
      spec.components.push_back(std::move(c));
    }
    config.qualityScore = std::move(spec);
  }

  if (root.contains("split")) {
    const Json& split = root.at("split");
    requireKnownKeys(split, "split", {"test_fraction"});
    config.testFraction = getOr(split, "test_fraction", config.testFraction);
  }

  if (root.contains("screening")) {
    const Json& screening = root.at("screening");
    requireKnownKeys(screening, "screening", {"k", "trees"});
    config.screeningK = getOr(screening, "k", config.screeningK);
    config.screeningTrees = getOr(screening, "trees", config.screeningTrees);
  }

  if (root.contains("forest")) {
    parseTrainConfig(root.at("forest"), "forest", config.forest, false);
  }
  if (root.contains("boosting")) {
    parseTrainConfig(root.at("boosting"), "boosting", config.boosting, true);
  }

  if (root.contains("baselines")) {
    const Json& baselines = root.at("baselines");
    requireKnownKeys(baselines, "baselines", {"knn_k", "ols"});
    config.knnK = getOr(baselines, "knn_k", config.knnK);
    config.olsBaseline = getOr(baselines, "ols", config.olsBaseline);
  }

  if (root.contains("vote")) {
    const Json& vote = root.at("vote");
    requireKnownKeys(vote, "vote", {"m"});
    config.voteM = getOr(vote, "m", config.voteM);
  }

  if (root.contains("overrides")) {
    for (const Json& rule : root.at("overrides")) {
      requireKnownKeys(rule, "override rule",
                       {"remove", "insert", "justification"});
      OverrideRule r;
      r.remove = rule.at("remove").get<std::string>();
      r.insert = rule.at("insert").get<std::string>();
      r.justification = getOr<std::string>(rule, "justification", "");
      if (r.justification.empty()) {
        throw ConfigError("override rules need a justification");
      }
      config.overrides.push_back(std::move(r));
    }
  }

  if (root.contains("doe")) {
    const Json& doe = root.at("doe");
    requireKnownKeys(doe, "doe",
                     {"factors", "percentile_low", "percentile_high",
                      "n_center", "responses", "desirability"});
    if (doe.contains("factors")) {
      std::vector<Factor> factors;
      for (const Json& f : doe.at("factors")) {
        requireKnownKeys(f, "factor", {"name", "low", "center", "high"});
        Factor factor = Factor::fromRange(f.at("name").get<std::string>(),
                                          f.at("low").get<double>(),
                                          f.at("high").get<double>());
        if (f.contains("center")) factor.center = f.at("center").get<double>();
        validateFactor(factor);
        factors.push_back(std::move(factor));
      }
      config.factors = std::move(factors);
    }
    config.percentileLow = getOr(doe, "percentile_low", config.percentileLow);
    config.percentileHigh =
        getOr(doe, "percentile_high", config.percentileHigh);
    config.nCenter = getOr(doe, "n_center", config.nCenter);
    if (doe.contains("responses")) {
      config.designResponses =
          resolve(base, doe.at("responses").get<std::string>());
    }
    if (doe.contains("desirability")) {
      const Json& des = doe.at("desirability");
      requireKnownKeys(des, "desirability", {"lo", "hi", "shape"});
      DesirabilitySpec spec;
      spec.lo = des.at("lo").get<double>();
      spec.hi = des.at("hi").get<double>();
      spec.shape = getOr(des, "shape", 1.0);
      config.desirabilitySpec = spec;
    }
  }

  return config;
}

std::string configDigest(const PipelineConfig& config) {
  Json j;
  j["name"] = config.name;
  j["input"] = config.input.string();
  j["missing_token"] = config.schema.missingToken;
  Json roles;
  for (const auto& [column, role] : config.schema.roles) {
    roles[column] = roleName(role);
  }
  j["roles"] = std::move(roles);
  j["default_role"] = config.schema.defaultRole
                          ? roleName(*config.schema.defaultRole)
                          : "";
  j["impute"] = imputeStrategyName(config.imputeStrategy);
  j["reference"] =
      config.referencePath ? config.referencePath->string() : "";
  if (config.qualityScore) {
    Json qs;
    qs["output"] = config.qualityScore->outputName;
    Json comps = Json::array();
    for (const auto& c : config.qualityScore->components) {
      comps.push_back(Json{{"column", c.column}, {"weight", c.weight}});
    }
    qs["components"] = std::move(comps);
    j["quality_score"] = std::move(qs);
  }
  j["test_fraction"] = config.testFraction;
  j["seed"] = config.seed;
  j["screening"] = Json{{"k", config.screeningK},
                        {"trees", config.screeningTrees}};
  j["forest"] = trainConfigJson(config.forest, false);
  j["boosting"] = trainConfigJson(config.boosting, true);
  j["baselines"] = Json{{"knn_k", config.knnK}, {"ols", config.olsBaseline}};
  j["vote_m"] = config.voteM;
  Json rules = Json::array();
  for (const auto& r : config.overrides) {
    rules.push_back(Json{{"remove", r.remove},
                         {"insert", r.insert},
                         {"justification", r.justification}});
  }
  j["overrides"] = std::move(rules);
  j["final_count"] = config.finalCount;
  if (config.factors) {
    Json factors = Json::array();
    for (const auto& f : *config.factors) {
      factors.push_back(Json{{"name", f.name},
                             {"low", f.low},
                             {"center", f.center},
                             {"high", f.high}});
    }
    j["factors"] = std::move(factors);
  }
  j["percentiles"] = Json::array({config.percentileLow, config.percentileHigh});
  j["n_center"] = config.nCenter;
  j["design_responses"] =
      config.designResponses ? config.designResponses->string() : "";
  if (config.desirabilitySpec) {
    j["desirability"] = Json{{"lo", config.desirabilitySpec->lo},
                             {"hi", config.desirabilitySpec->hi},
                             {"shape", config.desirabilitySpec->shape}};
  }

  const std::uint64_t digest = fnv1a64(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

}  // namespace qual
