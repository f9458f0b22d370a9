#include "qual/synth.hpp"

#include <cstdio>
#include <string>

#include "qual/doe.hpp"
#include "qual/errors.hpp"
#include "qual/random.hpp"

namespace qual {

Dataset generateSynthetic(int nRows, int nNoiseVars, double noiseSd,
                          std::uint64_t seed) {
  if (nRows < 10) throw SpecError("synthetic generator needs at least 10 rows");
  if (nNoiseVars < 0) throw SpecError("noise variable count must be nonnegative");
  if (noiseSd < 0.0) throw SpecError("noise standard deviation must be nonnegative");

  Dataset d;
  d.name = "synthetic";
  Column pigment{"Pigment fastness", Role::Input, Eigen::VectorXd(nRows), {}};
  Column productivity{"Machine productivity", Role::Input,
                      Eigen::VectorXd(nRows), {}};
  Column pileWeight{"Pile weight", Role::Input, Eigen::VectorXd(nRows), {}};
  Column score{"Textile quality score", Role::Response, Eigen::VectorXd(nRows),
               {}};
  std::vector<Column> noise;
  noise.reserve(static_cast<std::size_t>(nNoiseVars));
  for (int j = 0; j < nNoiseVars; ++j) {
    char name[32];
    std::snprintf(name, sizeof(name), "noise_%02d", j + 1);
    noise.push_back({name, Role::Input, Eigen::VectorXd(nRows), {}});
  }

  Rng rng = Rng::stream(seed, 0);
  for (int i = 0; i < nRows; ++i) {
    const double pf = rng.uniform(0.75, 1.0);
    const double mp = rng.uniform(0.45, 0.93);
    const double pw = rng.uniform(1500.0, 2729.0);
    pigment.values[i] = pf;
    productivity.values[i] = mp;
    pileWeight.values[i] = pw;
    double y = predictQualityEquation(pf, mp, pw);
    if (noiseSd > 0.0) y += noiseSd * rng.normal();
    score.values[i] = y;
    for (auto& col : noise) col.values[i] = rng.uniform();
  }

  const auto clearMask = [nRows](Column& c) {
    c.missing.assign(static_cast<std::size_t>(nRows), false);
  };
  clearMask(pigment);
  clearMask(productivity);
  clearMask(pileWeight);
  clearMask(score);
  d.columns.push_back(std::move(pigment));
  d.columns.push_back(std::move(productivity));
  d.columns.push_back(std::move(pileWeight));
  for (auto& col : noise) {
    clearMask(col);
    d.columns.push_back(std::move(col));
  }
  d.columns.push_back(std::move(score));
  return d;
}

}  // namespace qual
