#pragma once

// Small formatting helpers shared by the table writers.

#include <charconv>
#include <cstdio>
#include <string>

namespace qual::detail {

// Shortest representation that round-trips the exact double.
inline std::string formatShortest(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

inline std::string formatFixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return std::string(buf);
}

}  // namespace qual::detail
