#include "qual/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "qual/errors.hpp"

namespace qual {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> splitFields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parseCell(const std::string& raw, std::size_t lineNo,
                 const std::string& columnName) {
  double value = 0.0;
  const char* begin = raw.data();
  const char* end = begin + raw.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw CellError("line " + std::to_string(lineNo) + ", column '" +
                    columnName + "': cannot parse '" + raw + "' as a number");
  }
  return value;
}

void formatValue(std::ostream& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.write(buf, ptr - buf);
}

}  // namespace

Dataset loadTable(std::istream& in, const CsvSchema& schema,
                  const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("empty input: missing header row");
  }
  // strip a UTF-8 BOM if present
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

  std::vector<std::string> headers;
  {
    std::set<std::string> seen;
    for (const std::string& raw : splitFields(line, schema.delimiter)) {
      const std::string h = trim(raw);
      if (h.empty()) throw SchemaError("empty column name in header");
      if (!seen.insert(h).second) {
        throw SchemaError("duplicate column name '" + h + "'");
      }
      headers.push_back(h);
    }
  }

  for (const auto& [key, role] : schema.roles) {
    (void)role;
    if (std::find(headers.begin(), headers.end(), key) == headers.end()) {
      throw SchemaError("schema names unknown column '" + key + "'");
    }
  }

  Dataset out;
  out.name = name;
  out.columns.resize(headers.size());
  for (std::size_t j = 0; j < headers.size(); ++j) {
    Column& col = out.columns[j];
    col.name = headers[j];
    const auto it = schema.roles.find(headers[j]);
    if (it != schema.roles.end()) {
      col.role = it->second;
    } else if (schema.defaultRole) {
      col.role = *schema.defaultRole;
    } else {
      throw SchemaError("no role assigned for column '" + headers[j] + "'");
    }
  }

  std::vector<std::vector<double>> values(headers.size());
  std::vector<std::vector<bool>> missing(headers.size());
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // an empty line is only a row when the table has a single column
    // (a lone missing cell); otherwise it is skippable padding
    if (line.empty() && headers.size() > 1) continue;
    const auto fields = splitFields(line, schema.delimiter);
    if (fields.size() != headers.size()) {
      throw ParseError("line " + std::to_string(lineNo) + ": expected " +
                       std::to_string(headers.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string cell = trim(fields[j]);
      if (cell.empty() || cell == schema.missingToken) {
        values[j].push_back(std::numeric_limits<double>::quiet_NaN());
        missing[j].push_back(true);
      } else {
        values[j].push_back(parseCell(cell, lineNo, headers[j]));
        missing[j].push_back(false);
      }
    }
  }

  for (std::size_t j = 0; j < headers.size(); ++j) {
    Column& col = out.columns[j];
    col.values = Eigen::Map<const Eigen::VectorXd>(
        values[j].data(), static_cast<Eigen::Index>(values[j].size()));
    col.missing = std::move(missing[j]);
  }
  out.validate();
  return out;
}

Dataset loadTableFile(const std::filesystem::path& path,
                      const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return loadTable(in, schema, path.stem().string());
}

void saveTable(const Dataset& d, std::ostream& out,
               const std::string& missingToken, char delimiter) {
  d.validate();
  for (std::size_t j = 0; j < d.columns.size(); ++j) {
    if (j) out.put(delimiter);
    out << d.columns[j].name;
  }
  out.put('\n');
  for (Eigen::Index r = 0; r < d.rows(); ++r) {
    for (std::size_t j = 0; j < d.columns.size(); ++j) {
      if (j) out.put(delimiter);
      const Column& col = d.columns[j];
      if (col.missing[static_cast<std::size_t>(r)]) {
        out << missingToken;
      } else {
        formatValue(out, col.values[r]);
      }
    }
    out.put('\n');
  }
}

void saveTableFile(const Dataset& d, const std::filesystem::path& path,
                   const std::string& missingToken, char delimiter) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  saveTable(d, out, missingToken, delimiter);
}

}  // namespace qual
