#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "qual/dataset.hpp"

namespace qual {

enum class ImputeStrategy { ColumnMean, ColumnMedian, ReferenceLookup };

const char* imputeStrategyName(ImputeStrategy s);
ImputeStrategy imputeStrategyFromName(const std::string& name);

// Flat variable -> value mapping standing in for an external reference
// source of plausible fill values.
using ReferenceTable = std::map<std::string, double>;

// Fills every masked cell; observed values are untouched and fill
// statistics use observed entries only.
Dataset imputeMissing(const Dataset& d, ImputeStrategy strategy,
                      const ReferenceTable* reference = nullptr);

// Two-column CSV (variable,value) with a header row.
ReferenceTable loadReferenceTable(std::istream& in);
ReferenceTable loadReferenceTableFile(const std::filesystem::path& path);

}  // namespace qual
