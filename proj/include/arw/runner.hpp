#pragma once

#include <string>

#include "arw/config.hpp"

namespace arw {

inline constexpr const char* kBuildId = "arwlab 1.0.0";

/// Executes the experiment named by the config and writes its artifacts
/// (manifest, NDJSON records, CSV curves) under the output directory.
/// Recorded cap exhaustion is data, not failure; returns a nonzero status
/// only for invalid inputs, I/O errors, or a failed selftest.
int run(const RunConfig& config);

/// Output directory after the ARW_OUT_DIR environment override.
std::string resolve_out_dir(const RunConfig& config);

}  // namespace arw
