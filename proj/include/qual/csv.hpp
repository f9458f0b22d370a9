#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "qual/dataset.hpp"

namespace qual {

// Role assignment for a delimiter-separated file. Headers not listed in
// `roles` fall back to `defaultRole`; with no fallback they are an error,
// as is a schema entry naming a column absent from the header.
struct CsvSchema {
  std::map<std::string, Role> roles;
  std::optional<Role> defaultRole;
  std::string missingToken;  // blank cells always count as missing
  char delimiter = ',';
};

// Header row mandatory, '.' decimal separator, no quoting.
Dataset loadTable(std::istream& in, const CsvSchema& schema,
                  const std::string& name = "");
Dataset loadTableFile(const std::filesystem::path& path,
                      const CsvSchema& schema);

void saveTable(const Dataset& d, std::ostream& out,
               const std::string& missingToken = "", char delimiter = ',');
void saveTableFile(const Dataset& d, const std::filesystem::path& path,
                   const std::string& missingToken = "", char delimiter = ',');

}  // namespace qual
