#include "qual/screening.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "qual/errors.hpp"

namespace qual {

ScreenResult screenPredictors(const Dataset& d, int k, std::uint64_t seed,
                              int nTrees, int nThreads) {
  const auto inputs = d.inputColumnIndices();
  const int nInputs = static_cast<int>(inputs.size());
  if (k < 1 || k > nInputs) {
    throw FitError("screening k must lie in [1, " + std::to_string(nInputs) +
                   "]");
  }

  TrainConfig config;
  config.nTrees = nTrees;
  config.seed = seed;
  config.nThreads = nThreads;
  const ForestModel forest = fitRandomForest(toModelInput(d), config);
  const ImportanceRanking full = variableImportance(forest);

  ScreenResult result;
  result.ranking = full.truncated(static_cast<std::size_t>(k));

  std::set<std::string> keep;
  for (const auto& e : result.ranking.entries) keep.insert(e.variable);
  result.reduced = d;
  for (Column& col : result.reduced.columns) {
    if (col.role == Role::Input && !keep.count(col.name)) {
      col.role = Role::Ignored;
    }
  }
  return result;
}

std::vector<std::string> VotedSelection::variables() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.variable);
  return out;
}

VotedSelection voteRankings(const std::vector<NamedRanking>& rankings, int m) {
  if (rankings.empty()) throw VoteError("no rankings to vote over");
  if (m < 1) throw VoteError("vote size m must be at least 1");
  for (const auto& r : rankings) {
    if (static_cast<int>(r.variables.size()) < m) {
      throw VoteError("ranking '" + r.model + "' has fewer than " +
                      std::to_string(m) + " entries");
    }
  }

  std::map<std::string, VotedVariable> tally;
  for (const auto& r : rankings) {
    for (int rank = 0; rank < m; ++rank) {
      const std::string& var = r.variables[static_cast<std::size_t>(rank)];
      VotedVariable& entry = tally[var];
      entry.variable = var;
      entry.listings += 1;
      entry.bordaScore += static_cast<double>(m - rank);
      entry.models.push_back(r.model);
    }
  }

  VotedSelection selection;
  selection.m = m;
  selection.entries.reserve(tally.size());
  for (auto& [name, entry] : tally) {
    (void)name;
    selection.entries.push_back(std::move(entry));
  }
  std::sort(selection.entries.begin(), selection.entries.end(),
            [](const VotedVariable& a, const VotedVariable& b) {
              if (a.listings != b.listings) return a.listings > b.listings;
              if (a.bordaScore != b.bordaScore) {
                return a.bordaScore > b.bordaScore;
              }
              return a.variable < b.variable;
            });
  if (static_cast<int>(selection.entries.size()) > m) {
    selection.entries.resize(static_cast<std::size_t>(m));
  }
  return selection;
}

std::vector<std::string> applyOverrides(const VotedSelection& voted,
                                        const std::vector<OverrideRule>& rules,
                                        int finalCount) {
  if (finalCount < 1) throw OverrideError("final count must be at least 1");
  std::vector<std::string> selection = voted.variables();
  if (static_cast<int>(selection.size()) > finalCount) {
    selection.resize(static_cast<std::size_t>(finalCount));
  }

  for (const auto& rule : rules) {
    const auto at = std::find(selection.begin(), selection.end(), rule.remove);
    if (at == selection.end()) {
      throw OverrideError("override removes '" + rule.remove +
                          "', which is not in the selection");
    }
    if (std::find(selection.begin(), selection.end(), rule.insert) !=
        selection.end()) {
      throw OverrideError("override inserts '" + rule.insert +
                          "', which is already in the selection");
    }
    selection.erase(at);
    selection.push_back(rule.insert);
  }

  if (static_cast<int>(selection.size()) > finalCount) {
    selection.resize(static_cast<std::size_t>(finalCount));
  }
  return selection;
}

}  // namespace qual
