#include "qual/impute.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <vector>

#include "qual/errors.hpp"

namespace qual {

const char* imputeStrategyName(ImputeStrategy s) {
  switch (s) {
    case ImputeStrategy::ColumnMean: return "column-mean";
    case ImputeStrategy::ColumnMedian: return "column-median";
    case ImputeStrategy::ReferenceLookup: return "reference-lookup";
  }
  return "?";
}

ImputeStrategy imputeStrategyFromName(const std::string& name) {
  if (name == "column-mean") return ImputeStrategy::ColumnMean;
  if (name == "column-median") return ImputeStrategy::ColumnMedian;
  if (name == "reference-lookup") return ImputeStrategy::ReferenceLookup;
  throw ConfigError("unknown imputation strategy '" + name + "'");
}

namespace {

double observedMean(const Column& col) {
  double sum = 0.0;
  Eigen::Index n = 0;
  for (Eigen::Index r = 0; r < col.rows(); ++r) {
    if (col.missing[static_cast<std::size_t>(r)]) continue;
    sum += col.values[r];
    ++n;
  }
  if (n == 0) {
    throw ImputeError("column '" + col.name + "' has no observed values");
  }
  return sum / static_cast<double>(n);
}

double observedMedian(const Column& col) {
  std::vector<double> v;
  for (Eigen::Index r = 0; r < col.rows(); ++r) {
    if (!col.missing[static_cast<std::size_t>(r)]) v.push_back(col.values[r]);
  }
  if (v.empty()) {
    throw ImputeError("column '" + col.name + "' has no observed values");
  }
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return v[mid];
  return 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace

Dataset imputeMissing(const Dataset& d, ImputeStrategy strategy,
                      const ReferenceTable* reference) {
  Dataset out = d;
  for (Column& col : out.columns) {
    if (!col.hasMissing()) continue;
    double fill = 0.0;
    switch (strategy) {
      case ImputeStrategy::ColumnMean:
        fill = observedMean(col);
        break;
      case ImputeStrategy::ColumnMedian:
        fill = observedMedian(col);
        break;
      case ImputeStrategy::ReferenceLookup: {
        if (!reference) {
          throw LookupError("reference-lookup imputation needs a reference table");
        }
        const auto it = reference->find(col.name);
        if (it == reference->end()) {
          throw LookupError("no reference value for column '" + col.name + "'");
        }
        fill = it->second;
        break;
      }
    }
    for (Eigen::Index r = 0; r < col.rows(); ++r) {
      if (col.missing[static_cast<std::size_t>(r)]) col.values[r] = fill;
    }
    col.missing.assign(col.missing.size(), false);
  }
  return out;
}

ReferenceTable loadReferenceTable(std::istream& in) {
  ReferenceTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("empty reference table: missing header row");
  }
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto pos = line.rfind(',');
    if (pos == std::string::npos) {
      throw ParseError("reference table line " + std::to_string(lineNo) +
                       ": expected 'variable,value'");
    }
    const std::string key = line.substr(0, pos);
    const std::string raw = line.substr(pos + 1);
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
      throw CellError("reference table line " + std::to_string(lineNo) +
                      ": cannot parse value '" + raw + "'");
    }
    table[key] = value;
  }
  return table;
}

ReferenceTable loadReferenceTableFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return loadReferenceTable(in);
}

}  // namespace qual
