#pragma once

#include <filesystem>
#include <string>

#include "speckle/reconstruct.hpp"

namespace speckle {

/// Line-delimited JSON: one {"type": "iteration", ...} record per recorded
/// iteration, then one {"type": "summary", ...} record.
std::string diagnostics_ndjson(const ReconResult& result, const std::string& algorithm);
void write_diagnostics(const std::filesystem::path& path, const ReconResult& result,
                       const std::string& algorithm);

}  // namespace speckle
