#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qual {

// Base class for every error the toolkit raises.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };     // malformed table structure
struct SchemaError : Error { using Error::Error; };    // header/schema mismatch
struct CellError : Error { using Error::Error; };      // unparseable cell value
struct ImputeError : Error { using Error::Error; };
struct LookupError : Error { using Error::Error; };    // missing reference entry
struct SpecError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct SplitError : Error { using Error::Error; };
struct MetricError : Error { using Error::Error; };
struct FitError : Error { using Error::Error; };
struct PredictError : Error { using Error::Error; };
struct VoteError : Error { using Error::Error; };
struct OverrideError : Error { using Error::Error; };
struct RankError : Error { using Error::Error; };      // rank-deficient least squares
struct DomainError : Error { using Error::Error; };
struct DesignError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// Pipeline failure tagged with the stage that raised it.
struct StageError : Error {
  StageError(std::string stageName, const std::string& message)
      : Error("[" + stageName + "] " + message), stage(std::move(stageName)) {}
  std::string stage;
};

}  // namespace qual
