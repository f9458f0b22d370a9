#pragma once

#include <cstdint>

#include "qual/dataset.hpp"

namespace qual {

// Synthetic production table: the three retained factors drawn uniformly
// over their reference ranges, the quality score computed from the fixed
// prediction equation plus Gaussian noise, and nNoiseVars unrelated
// uniform[0,1] columns. Deterministic per seed.
Dataset generateSynthetic(int nRows, int nNoiseVars, double noiseSd,
                          std::uint64_t seed);

}  // namespace qual
