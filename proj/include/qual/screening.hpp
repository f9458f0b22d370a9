#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qual/dataset.hpp"
#include "qual/ensemble.hpp"

namespace qual {

struct ScreenResult {
  ImportanceRanking ranking;  // top-k only
  Dataset reduced;            // inputs outside the top-k set to ignored
};

// Forest-importance screening: trains a forest on every input variable and
// keeps the k highest-scoring ones.
ScreenResult screenPredictors(const Dataset& d, int k, std::uint64_t seed,
                              int nTrees = 200, int nThreads = 1);

// Ranked variable list contributed by one model.
struct NamedRanking {
  std::string model;
  std::vector<std::string> variables;  // best first
};

struct VotedVariable {
  std::string variable;
  int listings = 0;        // models listing it in their top-m
  double bordaScore = 0.0;  // top earns m points, m-th earns 1
  std::vector<std::string> models;
};

struct VotedSelection {
  int m = 0;
  std::vector<VotedVariable> entries;

  std::vector<std::string> variables() const;
};

// Two-key vote: listings count first, Borda score second, name last.
// Output is truncated to m variables.
VotedSelection voteRankings(const std::vector<NamedRanking>& rankings, int m);

// Expert swap applied to a voted selection; the justification is mandatory
// and echoed in reports.
struct OverrideRule {
  std::string remove;
  std::string insert;
  std::string justification;
};

// Truncates the voted list to finalCount, then applies each rule in order.
// A rule must remove a present variable and insert an absent one.
std::vector<std::string> applyOverrides(const VotedSelection& voted,
                                        const std::vector<OverrideRule>& rules,
                                        int finalCount);

}  // namespace qual
