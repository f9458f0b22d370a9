#pragma once

#include <filesystem>
#include <iosfwd>

#include "qual/ensemble.hpp"

namespace qual {

// Versioned JSON persistence for trained ensembles. Trees are stored as
// flat node arrays with child indices, so depth never hits parser limits.
void saveModel(const ForestModel& model, std::ostream& out);
void saveModel(const BoostedModel& model, std::ostream& out);
void saveModelFile(const ForestModel& model, const std::filesystem::path& path);
void saveModelFile(const BoostedModel& model, const std::filesystem::path& path);

ForestModel loadForestModel(std::istream& in);
BoostedModel loadBoostedModel(std::istream& in);
ForestModel loadForestModelFile(const std::filesystem::path& path);
BoostedModel loadBoostedModelFile(const std::filesystem::path& path);

}  // namespace qual
