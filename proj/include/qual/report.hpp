#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qual/baselines.hpp"
#include "qual/doe.hpp"
#include "qual/ensemble.hpp"
#include "qual/metrics.hpp"
#include "qual/screening.hpp"

namespace qual {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolkitVersion = "0.1.0";
inline constexpr int kReportVersion = 1;

// Fixed-width text table; first column left-aligned, the rest right-aligned.
std::string renderTable(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows);

std::string renderEffects(const std::vector<EffectRow>& effects,
                          Eigen::Index residualDf);
std::string renderAnova(const std::vector<AnovaRow>& anova);
std::string renderImportance(const ImportanceRanking& ranking);
std::string renderDesign(const ExperimentDesign& design,
                         const Eigen::VectorXd* responses = nullptr,
                         const std::string& responseName = "Response");
std::string renderVote(const VotedSelection& voted);

Json effectsJson(const std::vector<EffectRow>& effects);
Json anovaJson(const std::vector<AnovaRow>& anova);
Json importanceJson(const ImportanceRanking& ranking);
Json designJson(const ExperimentDesign& design,
                const Eigen::VectorXd* responses = nullptr);
Json factorsJson(const std::vector<Factor>& factors);
Json voteJson(const VotedSelection& voted);
Json metricsJson(const MetricReport& metrics);
Json riskJson(const RiskReport& risk);
Json optimumJson(const OptimizationResult& optimum,
                 const std::vector<Factor>& factors);
Json surfaceJson(const SurfaceFit& fit, const std::string& responseName);

}  // namespace qual
