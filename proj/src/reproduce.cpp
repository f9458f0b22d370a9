#include <cmath>
#include <sstream>

#include "qual/bundled.hpp"
#include "qual/errors.hpp"
#include "qual/pipeline.hpp"
#include "qual/reference.hpp"
#include "text_util.hpp"

namespace qual {
namespace {

namespace ref = qual::reference;

class CheckSink {
 public:
  explicit CheckSink(ReproductionResult& result) : result_(result) {}

  void numeric(const std::string& name, double expected, double actual,
               double tolerance) {
    CheckLine line;
    line.name = name;
    line.expected = expected;
    line.actual = actual;
    line.tolerance = tolerance;
    line.passed = std::isfinite(actual) &&
                  std::fabs(actual - expected) <= tolerance;
    result_.checks.push_back(std::move(line));
  }

  void boolean(const std::string& name, bool passed) {
    CheckLine line;
    line.name = name;
    line.expected = 1.0;
    line.actual = passed ? 1.0 : 0.0;
    line.tolerance = 0.0;
    line.passed = passed;
    result_.checks.push_back(std::move(line));
  }

 private:
  ReproductionResult& result_;
};

double fTolerance(double expected) {
  return std::max(ref::kFAbsTol, ref::kFRelTol * std::fabs(expected));
}

bool sameRun(const DesignRun& a, const DesignRun& b) {
  if (a.block != b.block) return false;
  for (std::size_t i = 0; i < a.natural.size(); ++i) {
    const double scale = std::max(1.0, std::fabs(b.natural[i]));
    if (std::fabs(a.natural[i] - b.natural[i]) > 1e-9 * scale) return false;
  }
  return true;
}

}  // namespace

ReproductionResult reproduceBundledStudy(
    const std::filesystem::path& dataDir) {
  ReproductionResult result;
  CheckSink sink(result);
  std::ostringstream text;

  const auto factors = loadFactorLevelsCsv(dataDir / "factor_levels.csv");
  const DesignTable bundled =
      readDesignCsvFile(dataDir / "ccf_design.csv");
  if (!bundled.responses) {
    throw DesignError("bundled design file carries no responses");
  }

  // design generation against the bundled run table
  const ExperimentDesign generated = buildCcfDesign(factors, 3);
  sink.boolean("design: 17 runs generated", generated.runs.size() == 17);
  {
    int corners = 0;
    int faces = 0;
    int centers = 0;
    int blockOneNegativeCorners = 0;
    std::vector<int> blockSize(4, 0);
    for (const auto& run : generated.runs) {
      double absSum = 0.0;
      double product = 1.0;
      for (double c : run.coded) {
        absSum += std::fabs(c);
        product *= c;
      }
      if (absSum == 3.0) {
        ++corners;
        if (run.block == 1 && product == -1.0) ++blockOneNegativeCorners;
      } else if (absSum == 1.0) {
        ++faces;
      } else if (absSum == 0.0) {
        ++centers;
      }
      ++blockSize[static_cast<std::size_t>(run.block)];
    }
    sink.boolean("design: 8 corner runs", corners == 8);
    sink.boolean("design: 6 face runs", faces == 6);
    sink.boolean("design: 3 center runs", centers == 3);
    sink.boolean("design: block sizes 5/5/7",
                 blockSize[1] == 5 && blockSize[2] == 5 && blockSize[3] == 7);
    sink.boolean("design: block-1 corners have coded product -1",
                 blockOneNegativeCorners == 4);

    std::vector<bool> used(bundled.design.runs.size(), false);
    bool matched = true;
    for (const auto& run : generated.runs) {
      bool found = false;
      for (std::size_t j = 0; j < bundled.design.runs.size(); ++j) {
        if (!used[j] && sameRun(run, bundled.design.runs[j])) {
          used[j] = true;
          found = true;
          break;
        }
      }
      if (!found) matched = false;
    }
    sink.boolean("design: generated runs equal the bundled table as a set",
                 matched);
  }

  // surface fit against the published effects table
  const SurfaceFit fit =
      fitResponseSurface(bundled.design, *bundled.responses);
  sink.boolean("effects: residual df = 5", fit.residualDf == 5);
  if (fit.effects.size() != ref::kEffects.size() ||
      fit.anova.size() != ref::kAnova.size()) {
    throw DesignError("surface fit produced an unexpected table shape");
  }
  for (std::size_t i = 0; i < ref::kEffects.size(); ++i) {
    const auto& expected = ref::kEffects[i];
    const EffectRow& actual = fit.effects[i];
    const std::string term(expected.term);
    sink.boolean("effects: row " + std::to_string(i) + " is '" + term + "'",
                 actual.term == term);
    sink.numeric("effects: " + term + " effect", expected.effect,
                 actual.effect, ref::kEffectTol);
    sink.numeric("effects: " + term + " standard error",
                 expected.standardError, actual.standardError,
                 ref::kStandardErrorTol);
    sink.numeric("effects: " + term + " t", expected.t, actual.t, ref::kTTol);
    sink.numeric("effects: " + term + " p", expected.p, actual.p, ref::kPTol);
  }

  // ANOVA against the published table
  for (std::size_t i = 0; i < ref::kAnova.size(); ++i) {
    const auto& expected = ref::kAnova[i];
    const AnovaRow& actual = fit.anova[i];
    const std::string term(expected.term);
    sink.boolean("anova: row " + std::to_string(i) + " is '" + term + "'",
                 actual.term == term);
    sink.numeric("anova: " + term + " SS", expected.ss, actual.ss,
                 ref::kSsTol);
    sink.boolean("anova: " + term + " df = " + std::to_string(expected.df),
                 actual.df == expected.df);
    if (expected.ms) {
      sink.numeric("anova: " + term + " MS", *expected.ms,
                   actual.ms.value_or(NAN), ref::kSsTol);
    }
    if (expected.f) {
      sink.numeric("anova: " + term + " F", *expected.f,
                   actual.f.value_or(NAN), fTolerance(*expected.f));
    }
    if (expected.p) {
      sink.numeric("anova: " + term + " p", *expected.p,
                   actual.p.value_or(NAN), ref::kPTol);
    }
  }

  // fixed prediction equation against the bundled estimates
  const MlrTable mlr = loadMlrEstimatesCsv(dataDir / "mlr_estimates.csv");
  for (Eigen::Index i = 0; i < mlr.estimated.size(); ++i) {
    const double predicted = predictQualityEquation(
        mlr.settings(i, 0), mlr.settings(i, 1), mlr.settings(i, 2));
    sink.numeric("equation: run " + std::to_string(i + 1) + " estimate",
                 mlr.estimated[i], predicted, ref::kMlrTol);
  }
  sink.numeric("equation: spot value at (1.0, 0.45, 1500)", 0.904503,
               predictQualityEquation(1.0, 0.45, 1500.0), ref::kMlrTol);
  sink.numeric("equation: spot value at (0.75, 0.45, 1500)", 0.887693,
               predictQualityEquation(0.75, 0.45, 1500.0), ref::kMlrTol);

  // assemble the report
  text << "Reference reproduction\n======================\n\n";
  text << "Design (bundled runs and measured scores):\n"
       << renderDesign(bundled.design, &*bundled.responses,
                       bundled.responseName)
       << "\n";
  text << "Fitted effects:\n" << renderEffects(fit.effects, fit.residualDf)
       << "\n";
  text << "Fitted ANOVA:\n" << renderAnova(fit.anova) << "\n";
  for (const auto& check : result.checks) {
    text << (check.passed ? "[PASS] " : "[FAIL] ") << check.name;
    if (check.tolerance > 0.0) {
      text << ": expected " << detail::formatShortest(check.expected)
           << ", got " << detail::formatShortest(check.actual)
           << " (tolerance " << detail::formatShortest(check.tolerance)
           << ")";
    }
    text << "\n";
  }
  text << "\n"
       << (result.allPassed()
               ? "All checks passed."
               : std::to_string(result.failedCount()) + " checks FAILED.")
       << "\n";
  result.text = text.str();

  result.structured["report_version"] = kReportVersion;
  result.structured["toolkit"] =
      Json{{"name", "qualtool"}, {"version", kToolkitVersion}};
  Json checks = Json::array();
  for (const auto& check : result.checks) {
    Json c;
    c["name"] = check.name;
    c["passed"] = check.passed;
    c["expected"] = check.expected;
    c["actual"] = check.actual;
    c["tolerance"] = check.tolerance;
    checks.push_back(std::move(c));
  }
  result.structured["checks"] = std::move(checks);
  result.structured["all_passed"] = result.allPassed();
  result.structured["design"] = designJson(bundled.design, &*bundled.responses);
  result.structured["effects"] = effectsJson(fit.effects);
  result.structured["anova"] = anovaJson(fit.anova);
  return result;
}

}  // namespace qual
