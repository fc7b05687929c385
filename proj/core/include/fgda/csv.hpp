#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "fgda/dataset.hpp"

namespace fgda {

/*
 * Dataset / feature-dump CSV:
 *
 *   domain,label,f0,f1,...,f{m-1}
 *   0,1,0.5,-2.0
 *
 * domain is 0 (source) or 1 (target); label is -1 for unlabeled or a class
 * index. Features are written in shortest round-trip form, LF line endings.
 */

/// Throws ParseError with a 1-based line number on ragged rows, bad numbers or bad labels.
/// When num_classes is given, labels >= num_classes are rejected too.
Dataset read_csv_dataset(std::istream& in, std::optional<std::size_t> num_classes = std::nullopt);
Dataset load_csv_dataset(const std::filesystem::path& path, std::optional<std::size_t> num_classes = std::nullopt);

void write_csv_dataset(std::ostream& out, const Dataset& data);
void save_csv_dataset(const Dataset& data, const std::filesystem::path& path);

} // namespace fgda
