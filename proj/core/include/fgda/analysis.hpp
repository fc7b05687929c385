#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fgda/dataset.hpp"
#include "fgda/nets.hpp"

namespace fgda {

struct ClassCenters {
    Matrix centers;                   // [K x h]; rows of absent classes are zero
    std::vector<std::size_t> counts;  // samples per class
    std::vector<bool> present;

    std::size_t present_count() const;
};

/// Per-class means. Every label must lie in [0, K).
ClassCenters class_centers(const Matrix& features, std::span<const int> labels, std::size_t num_classes);

struct CcdReport {
    std::vector<double> per_class;  // NaN for absent classes
    double mean = 0.0;              // over present classes
    std::vector<std::size_t> counts;
    std::size_t feature_dim = 0;
};

/**
 * Class Center Distance
 *
 *   CCD(i) = 1/(K'-1) * sum_{j != i} [ mean_{x in S_i} |x - mu_i|^2 ] / |mu_i - mu_j|^2
 *
 * with K' the number of present classes and absent classes dropped from the
 * sum. Lower means tighter classes relative to their separation.
 *
 * Throws DataError with fewer than two present classes and
 * DegenerateGeometryError when two centers are closer than 1e-6 (squared
 * distance below 1e-12).
 */
CcdReport ccd(const Matrix& features, std::span<const int> labels, std::size_t num_classes);

enum class CcdScope { both, source, target };

/// CCD over the labeled samples of a feature dataset restricted to a scope.
CcdReport ccd(const Dataset& features, std::size_t num_classes, CcdScope scope = CcdScope::both);

/**
 * Runs the feature extractor over `data` and returns one row per kept sample
 * (domain, label, h features). With cap > 0, each domain is subsampled to at
 * most `cap` rows, chosen deterministically from `seed`; row order is preserved.
 */
Dataset extract_features(const ModelBundle& model, const Dataset& data, std::size_t cap = 0, std::uint64_t seed = 0);

/// extract_features + CSV write. Throws IoError when the path cannot be written.
Dataset dump_features(const ModelBundle& model, const Dataset& data, const std::filesystem::path& path,
                      std::size_t cap = 0, std::uint64_t seed = 0);

} // namespace fgda
