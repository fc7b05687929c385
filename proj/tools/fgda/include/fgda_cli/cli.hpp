#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fgda/config.hpp"

namespace fgda::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kRuntimeError = 2 };

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/**
 * Builds a TrainConfig from defaults, an optional JSON file, `key=value`
 * overrides and an optional strategy. Override values are read as JSON when
 * they parse, otherwise as plain strings. Throws ValidationError.
 */
TrainConfig resolve_config(const std::optional<std::filesystem::path>& config_path,
                           const std::vector<std::string>& overrides, const std::string& strategy = {});

/// Splits "a,b,[1,2]" on top-level commas.
std::vector<std::string> split_values(const std::string& list);

/// Median of the values; NaN when empty.
double median(std::vector<double> values);

} // namespace fgda::cli
