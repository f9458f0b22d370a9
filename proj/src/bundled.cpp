#include "qual/bundled.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

#include "qual/csv.hpp"
#include "qual/errors.hpp"

namespace qual {
namespace {

std::vector<std::string> splitLine(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parseNumber(const std::string& raw, const std::string& where) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(raw.data(), raw.data() + raw.size(), value);
  if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
    throw CellError(where + ": cannot parse '" + raw + "'");
  }
  return value;
}

std::vector<std::vector<std::string>> readRows(
    const std::filesystem::path& path, std::size_t fieldCount) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("'" + path.string() + "' is empty");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = splitLine(line);
    if (fields.size() != fieldCount) {
      throw ParseError(path.string() + " line " + std::to_string(lineNo) +
                       ": expected " + std::to_string(fieldCount) +
                       " fields");
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

std::vector<Factor> loadFactorLevelsCsv(const std::filesystem::path& path) {
  std::vector<Factor> factors;
  for (const auto& row : readRows(path, 4)) {
    Factor f;
    f.name = row[0];
    f.low = parseNumber(row[1], path.string());
    f.center = parseNumber(row[2], path.string());
    f.high = parseNumber(row[3], path.string());
    validateFactor(f);
    factors.push_back(std::move(f));
  }
  if (factors.empty()) {
    throw ParseError("'" + path.string() + "' lists no factors");
  }
  return factors;
}

std::vector<NamedRanking> loadRankingsCsv(const std::filesystem::path& path) {
  struct Entry {
    int rank;
    std::string variable;
  };
  std::vector<std::string> modelOrder;
  std::map<std::string, std::vector<Entry>> byModel;
  for (const auto& row : readRows(path, 3)) {
    const std::string& model = row[0];
    const int rank = static_cast<int>(parseNumber(row[1], path.string()));
    if (!byModel.count(model)) modelOrder.push_back(model);
    byModel[model].push_back({rank, row[2]});
  }
  std::vector<NamedRanking> rankings;
  for (const auto& model : modelOrder) {
    auto& entries = byModel[model];
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.rank < b.rank; });
    NamedRanking ranking;
    ranking.model = model;
    for (auto& e : entries) ranking.variables.push_back(std::move(e.variable));
    rankings.push_back(std::move(ranking));
  }
  if (rankings.empty()) {
    throw ParseError("'" + path.string() + "' lists no rankings");
  }
  return rankings;
}

MlrTable loadMlrEstimatesCsv(const std::filesystem::path& path) {
  CsvSchema schema;
  schema.defaultRole = Role::Input;
  const Dataset table = loadTableFile(path, schema);
  if (table.cols() != 5) {
    throw ParseError("'" + path.string() +
                     "' needs three factor columns, estimated and validated");
  }
  if (table.hasMissing()) {
    throw ParseError("'" + path.string() + "' has missing cells");
  }
  MlrTable out;
  out.settings.resize(table.rows(), 3);
  for (int j = 0; j < 3; ++j) {
    out.factorNames.push_back(table.columns[static_cast<std::size_t>(j)].name);
    out.settings.col(j) = table.columns[static_cast<std::size_t>(j)].values;
  }
  out.estimated = table.columns[3].values;
  out.validated = table.columns[4].values;
  return out;
}

}  // namespace qual
