#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "qual/dataset.hpp"
#include "qual/errors.hpp"

using namespace qual;
using test::makeColumn;
using test::makeDataset;

TEST_CASE("dataset invariants are enforced") {
  SUBCASE("duplicate column names") {
    Dataset d;
    d.columns.push_back(makeColumn("a", Role::Input, {1.0}));
    d.columns.push_back(makeColumn("a", Role::Input, {2.0}));
    CHECK_THROWS_AS(d.validate(), SchemaError);
  }
  SUBCASE("two response columns") {
    Dataset d;
    d.columns.push_back(makeColumn("a", Role::Response, {1.0}));
    d.columns.push_back(makeColumn("b", Role::Response, {2.0}));
    CHECK_THROWS_AS(d.validate(), SchemaError);
  }
  SUBCASE("ragged columns") {
    Dataset d;
    d.columns.push_back(makeColumn("a", Role::Input, {1.0, 2.0}));
    d.columns.push_back(makeColumn("b", Role::Input, {1.0}));
    CHECK_THROWS_AS(d.validate(), SchemaError);
  }
}

TEST_CASE("quality score: seven equal components give the component value") {
  std::vector<Column> columns;
  for (int j = 0; j < 7; ++j) {
    columns.push_back(makeColumn("c" + std::to_string(j), Role::Input,
                                 {0.9, 0.9, 0.9}));
  }
  QualityScoreSpec spec;
  for (int j = 0; j < 7; ++j) spec.components.push_back({"c" + std::to_string(j), 1.0});
  spec.outputName = "score";
  const Dataset scored = composeQualityScore(makeDataset(std::move(columns)), spec);
  const Column& score = scored.column("score");
  CHECK(score.role == Role::Response);
  for (int i = 0; i < 3; ++i) CHECK(score.values[i] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("quality score: weighted mean 0.75*0.8 + 0.25*1.0 = 0.85") {
  const Dataset d = makeDataset({makeColumn("a", Role::Input, {0.8}),
                                 makeColumn("b", Role::Input, {1.0})});
  QualityScoreSpec spec;
  spec.components = {{"a", 0.75}, {"b", 0.25}};
  const Dataset scored = composeQualityScore(d, spec);
  CHECK(scored.column("Quality score").values[0] ==
        doctest::Approx(0.85).epsilon(1e-12));
}

TEST_CASE("quality score: weights are normalized") {
  const Dataset d = makeDataset({makeColumn("a", Role::Input, {0.8}),
                                 makeColumn("b", Role::Input, {1.0})});
  QualityScoreSpec spec;
  spec.components = {{"a", 3.0}, {"b", 1.0}};  // same ratio as 0.75/0.25
  CHECK(composeQualityScore(d, spec).column("Quality score").values[0] ==
        doctest::Approx(0.85).epsilon(1e-12));
}

TEST_CASE("quality score: single component of weight 1 is returned verbatim") {
  Rng rng(7);
  std::vector<double> values;
  for (int i = 0; i < 40; ++i) values.push_back(rng.uniform());
  const Dataset d = makeDataset({makeColumn("only", Role::Input, values)});
  QualityScoreSpec spec;
  spec.components = {{"only", 1.0}};
  const Dataset scored = composeQualityScore(d, spec);
  for (int i = 0; i < 40; ++i) {
    CHECK(scored.column("Quality score").values[i] == values[static_cast<std::size_t>(i)]);
  }
}

TEST_CASE("quality score error paths") {
  const Dataset d = makeDataset({makeColumn("a", Role::Input, {0.5}),
                                 makeColumn("big", Role::Input, {1.5})});
  SUBCASE("component outside [0,1]") {
    QualityScoreSpec spec;
    spec.components = {{"big", 1.0}};
    CHECK_THROWS_AS(composeQualityScore(d, spec), RangeError);
  }
  SUBCASE("empty component list") {
    QualityScoreSpec spec;
    CHECK_THROWS_AS(composeQualityScore(d, spec), SpecError);
  }
  SUBCASE("unknown component") {
    QualityScoreSpec spec;
    spec.components = {{"ghost", 1.0}};
    CHECK_THROWS_AS(composeQualityScore(d, spec), SpecError);
  }
  SUBCASE("component not imputed") {
    const Dataset masked = makeDataset(
        {makeColumn("a", Role::Input, {0.5, 0.5}, {false, true})});
    QualityScoreSpec spec;
    spec.components = {{"a", 1.0}};
    CHECK_THROWS_AS(composeQualityScore(masked, spec), SpecError);
  }
  SUBCASE("existing response") {
    const Dataset withResponse = makeDataset(
        {makeColumn("a", Role::Input, {0.5}),
         makeColumn("y", Role::Response, {0.1})});
    QualityScoreSpec spec;
    spec.components = {{"a", 1.0}};
    CHECK_THROWS_AS(composeQualityScore(withResponse, spec), SpecError);
  }
}

namespace {

Dataset numbered(int n) {
  std::vector<double> values;
  for (int i = 0; i < n; ++i) values.push_back(i);
  return makeDataset({makeColumn("x", Role::Input, values)});
}

}  // namespace

TEST_CASE("split sizes follow round(fraction * rows) with clamping") {
  const auto [train, test] = splitTrainTest(numbered(10), 0.3, 7);
  CHECK(train.rows() == 7);
  CHECK(test.rows() == 3);

  const auto tiny = splitTrainTest(numbered(10), 0.01, 7);
  CHECK(tiny.second.rows() == 1);
  const auto huge = splitTrainTest(numbered(10), 0.99, 7);
  CHECK(huge.second.rows() == 9);
}

TEST_CASE("split is deterministic for a fixed seed") {
  const auto a = splitTrainTest(numbered(50), 0.25, 11);
  const auto b = splitTrainTest(numbered(50), 0.25, 11);
  CHECK(a.first.columns[0].values == b.first.columns[0].values);
  CHECK(a.second.columns[0].values == b.second.columns[0].values);
}

TEST_CASE("split partitions the rows for any seed") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto [train, test] = splitTrainTest(numbered(23), 0.35, seed);
    std::set<double> seen;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
      seen.insert(train.columns[0].values[i]);
    }
    for (Eigen::Index i = 0; i < test.rows(); ++i) {
      const bool inserted = seen.insert(test.columns[0].values[i]).second;
      CHECK(inserted);  // disjoint
    }
    CHECK(seen.size() == 23);  // union covers all rows
  }
}

TEST_CASE("split rejects undersized or abusive input") {
  CHECK_THROWS_AS(splitTrainTest(numbered(1), 0.5, 0), SplitError);
  CHECK_THROWS_AS(splitTrainTest(numbered(10), 0.0, 0), SplitError);
  CHECK_THROWS_AS(splitTrainTest(numbered(10), 1.0, 0), SplitError);
}

TEST_CASE("toModelInput demands a fully imputed response") {
  SUBCASE("no response") {
    CHECK_THROWS_AS(toModelInput(numbered(5)), FitError);
  }
  SUBCASE("masked input") {
    const Dataset d = makeDataset(
        {makeColumn("x", Role::Input, {1.0, 2.0}, {true, false}),
         makeColumn("y", Role::Response, {1.0, 2.0})});
    CHECK_THROWS_AS(toModelInput(d), FitError);
  }
  SUBCASE("ignored columns are dropped") {
    const Dataset d = makeDataset(
        {makeColumn("x", Role::Input, {1.0, 2.0}),
         makeColumn("skip", Role::Ignored, {9.0, 9.0}),
         makeColumn("y", Role::Response, {1.0, 2.0})});
    const ModelInput input = toModelInput(d);
    CHECK(input.featureCount() == 1);
    CHECK(input.featureNames == std::vector<std::string>{"x"});
  }
}
