#pragma once

// Published values of the reference case study that this toolkit
// reproduces, together with the comparison tolerances used by the
// reproduce-paper command. Frozen; do not recompute.

#include <array>
#include <optional>
#include <string_view>

namespace qual::reference {

struct EffectValue {
  std::string_view term;
  double effect;
  double standardError;
  double t;
  double p;
};

inline constexpr std::array<EffectValue, 12> kEffects{{
    {"Mean/Interc.", 0.864126, 0.000580, 1489.964, 0.000000},
    {"Blocks(1)", -0.000840, 0.000814, -1.033, 0.348921},
    {"Blocks(2)", 0.000881, 0.000902, 0.977, 0.373449},
    {"Pigment fastness (L)", 0.016560, 0.000677, 24.454, 0.000002},
    {"Pigment fastness (Q)", -0.002121, 0.001352, -1.568, 0.177558},
    {"Machine productivity (L)", -0.071600, 0.000677, -105.730, 0.000000},
    {"Machine productivity (Q)", 0.000679, 0.001352, 0.502, 0.637131},
    {"Pile weight (L)", 0.006600, 0.000677, 9.746, 0.000193},
    {"Pile weight (Q)", 0.001679, 0.001352, 1.241, 0.269599},
    {"1L by 2L", 0.000500, 0.000757, 0.660, 0.538208},
    {"1L by 3L", 0.000500, 0.000757, 0.660, 0.538208},
    {"2L by 3L", 0.001000, 0.000757, 1.321, 0.243793},
}};

struct AnovaValue {
  std::string_view term;
  double ss;
  int df;
  std::optional<double> ms;
  std::optional<double> f;
  std::optional<double> p;
};

inline const std::array<AnovaValue, 12> kAnova{{
    {"Blocks", 0.000001, 2, 0.000001, 0.65, 0.560391},
    {"Pigment fastness (L)", 0.000686, 1, 0.000686, 597.99, 0.000002},
    {"Pigment fastness (Q)", 0.000003, 1, 0.000003, 2.46, 0.177558},
    {"Machine productivity (L)", 0.012816, 1, 0.012816, 11178.90, 0.000000},
    {"Machine productivity (Q)", 0.000000, 1, 0.000000, 0.25, 0.637131},
    {"Pile weight (L)", 0.000109, 1, 0.000109, 94.99, 0.000193},
    {"Pile weight (Q)", 0.000002, 1, 0.000002, 1.54, 0.269599},
    {"1L by 2L", 0.000000, 1, 0.000000, 0.44, 0.538208},
    {"1L by 3L", 0.000001, 1, 0.000001, 0.44, 0.538208},
    {"2L by 3L", 0.000002, 1, 0.000002, 1.74, 0.243793},
    {"Error", 0.000006, 5, 0.000001, std::nullopt, std::nullopt},
    {"Total SS", 0.013625, 16, std::nullopt, std::nullopt, std::nullopt},
}};

// Comparison tolerances. F carries an extra absolute floor because the
// published table rounds to two decimals.
inline constexpr double kEffectTol = 5e-6;
inline constexpr double kStandardErrorTol = 5e-6;
inline constexpr double kTTol = 0.05;
inline constexpr double kPTol = 1e-4;
inline constexpr double kSsTol = 1e-6;
inline constexpr double kFRelTol = 0.005;
inline constexpr double kFAbsTol = 0.0051;
inline constexpr double kMlrTol = 1e-3;  // table rounding

}  // namespace qual::reference
