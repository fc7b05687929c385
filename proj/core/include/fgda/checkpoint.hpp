#pragma once

#include <filesystem>
#include <string>

#include "fgda/nets.hpp"

namespace fgda {

inline constexpr int kCheckpointFormatVersion = 1;

/// JSON text holding architectures, K, seed and row-major parameter arrays.
std::string checkpoint_to_string(const ModelBundle& model);
ModelBundle checkpoint_from_string(const std::string& text);

void save_checkpoint(const ModelBundle& model, const std::filesystem::path& path);
ModelBundle load_checkpoint(const std::filesystem::path& path);

} // namespace fgda
