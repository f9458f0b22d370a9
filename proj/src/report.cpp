#include "qual/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "text_util.hpp"

namespace qual {
namespace {

using detail::formatFixed;
using detail::formatShortest;

std::string formatOptional(const std::optional<double>& v, int decimals) {
  return v ? formatFixed(*v, decimals) : std::string();
}

}  // namespace

std::string renderTable(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size() && j < width.size(); ++j) {
      width[j] = std::max(width[j], row[j].size());
    }
  }
  std::ostringstream out;
  const auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t j = 0; j < width.size(); ++j) {
      const std::string& cell = j < row.size() ? row[j] : std::string();
      if (j == 0) {
        out << cell << std::string(width[j] - cell.size(), ' ');
      } else {
        out << "  " << std::string(width[j] - cell.size(), ' ') << cell;
      }
    }
    out << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (std::size_t j = 0; j < width.size(); ++j) {
    total += width[j] + (j ? 2 : 0);
  }
  out << std::string(total, '-') << '\n';
  for (const auto& row : rows) emit(row);
  return out.str();
}

std::string renderEffects(const std::vector<EffectRow>& effects,
                          Eigen::Index residualDf) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : effects) {
    rows.push_back({e.term, formatFixed(e.effect, 6),
                    formatFixed(e.standardError, 6), formatFixed(e.t, 3),
                    formatFixed(e.p, 6)});
  }
  return renderTable({"Factor", "Effect", "Standard error",
                      "t (" + std::to_string(residualDf) + ")", "P"},
                     rows);
}

std::string renderAnova(const std::vector<AnovaRow>& anova) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& a : anova) {
    rows.push_back({a.term, formatFixed(a.ss, 6), std::to_string(a.df),
                    formatOptional(a.ms, 6), formatOptional(a.f, 2),
                    formatOptional(a.p, 6)});
  }
  return renderTable({"Factor", "SS", "df", "MS", "F", "P"}, rows);
}

std::string renderImportance(const ImportanceRanking& ranking) {
  std::vector<std::vector<std::string>> rows;
  int rank = 1;
  for (const auto& e : ranking.entries) {
    rows.push_back({e.variable, std::to_string(rank++),
                    formatFixed(e.score, 2)});
  }
  return renderTable({"Variable", "Rank", "Score"}, rows);
}

std::string renderDesign(const ExperimentDesign& design,
                         const Eigen::VectorXd* responses,
                         const std::string& responseName) {
  std::vector<std::string> header{"Standard run", "Blocks"};
  for (const auto& f : design.factors) header.push_back(f.name);
  if (responses) header.push_back(responseName);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < design.runs.size(); ++i) {
    const DesignRun& run = design.runs[i];
    std::vector<std::string> row{std::to_string(run.standardOrder),
                                 std::to_string(run.block)};
    for (double v : run.natural) row.push_back(formatShortest(v));
    if (responses) {
      row.push_back(formatShortest((*responses)[static_cast<Eigen::Index>(i)]));
    }
    rows.push_back(std::move(row));
  }
  return renderTable(header, rows);
}

std::string renderVote(const VotedSelection& voted) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : voted.entries) {
    std::string models;
    for (std::size_t i = 0; i < e.models.size(); ++i) {
      if (i) models += ", ";
      models += e.models[i];
    }
    rows.push_back({e.variable, std::to_string(e.listings),
                    formatFixed(e.bordaScore, 0), models});
  }
  return renderTable({"Variable", "Listings", "Borda", "Models"}, rows);
}

Json effectsJson(const std::vector<EffectRow>& effects) {
  Json out = Json::array();
  for (const auto& e : effects) {
    Json row;
    row["term"] = e.term;
    row["effect"] = e.effect;
    row["standard_error"] = e.standardError;
    row["t"] = e.t;
    row["p"] = e.p;
    out.push_back(std::move(row));
  }
  return out;
}

Json anovaJson(const std::vector<AnovaRow>& anova) {
  Json out = Json::array();
  for (const auto& a : anova) {
    Json row;
    row["term"] = a.term;
    row["ss"] = a.ss;
    row["df"] = a.df;
    if (a.ms) row["ms"] = *a.ms;
    if (a.f) row["f"] = *a.f;
    if (a.p) row["p"] = *a.p;
    out.push_back(std::move(row));
  }
  return out;
}

Json importanceJson(const ImportanceRanking& ranking) {
  Json out = Json::array();
  for (const auto& e : ranking.entries) {
    out.push_back(Json{{"variable", e.variable}, {"score", e.score}});
  }
  return out;
}

Json designJson(const ExperimentDesign& design,
                const Eigen::VectorXd* responses) {
  Json out;
  out["n_center"] = design.nCenter;
  Json runs = Json::array();
  for (std::size_t i = 0; i < design.runs.size(); ++i) {
    const DesignRun& run = design.runs[i];
    Json r;
    r["standard_order"] = run.standardOrder;
    r["block"] = run.block;
    r["coded"] = run.coded;
    r["natural"] = run.natural;
    if (responses) r["response"] = (*responses)[static_cast<Eigen::Index>(i)];
    runs.push_back(std::move(r));
  }
  out["runs"] = std::move(runs);
  return out;
}

Json factorsJson(const std::vector<Factor>& factors) {
  Json out = Json::array();
  for (const auto& f : factors) {
    out.push_back(Json{{"name", f.name},
                       {"low", f.low},
                       {"center", f.center},
                       {"high", f.high}});
  }
  return out;
}

Json voteJson(const VotedSelection& voted) {
  Json out;
  out["m"] = voted.m;
  Json entries = Json::array();
  for (const auto& e : voted.entries) {
    entries.push_back(Json{{"variable", e.variable},
                           {"listings", e.listings},
                           {"borda", e.bordaScore},
                           {"models", e.models}});
  }
  out["selection"] = std::move(entries);
  return out;
}

Json metricsJson(const MetricReport& metrics) {
  return Json{{"mse", metrics.mse},
              {"rmse", metrics.rmse},
              {"mae", metrics.mae},
              {"n", metrics.n}};
}

Json riskJson(const RiskReport& risk) {
  return Json{{"split", risk.split},
              {"risk_estimate", risk.riskEstimate},
              {"standard_error", risk.standardError},
              {"n", risk.n}};
}

Json optimumJson(const OptimizationResult& optimum,
                 const std::vector<Factor>& factors) {
  Json out;
  Json levels = Json::array();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    levels.push_back(Json{{"factor", factors[i].name},
                          {"coded", optimum.codedLevels[i]},
                          {"natural", optimum.naturalLevels[i]}});
  }
  out["levels"] = std::move(levels);
  out["desirability"] = optimum.desirability;
  out["predicted_response"] = optimum.predictedResponse;
  return out;
}

Json surfaceJson(const SurfaceFit& fit, const std::string& responseName) {
  Json out;
  out["response"] = responseName;
  out["residual_df"] = fit.residualDf;
  out["error_ms"] = fit.errorMs;
  out["total_ss"] = fit.totalSs;
  Json coefficients = Json::array();
  for (Eigen::Index j = 0; j < fit.solution.coefficients.size(); ++j) {
    coefficients.push_back(
        Json{{"term", fit.solution.labels[static_cast<std::size_t>(j)]},
             {"coefficient", fit.solution.coefficients[j]}});
  }
  out["coefficients"] = std::move(coefficients);
  out["effects"] = effectsJson(fit.effects);
  out["anova"] = anovaJson(fit.anova);
  return out;
}

}  // namespace qual
