#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "fgda/dataset.hpp"

namespace fgda {

/**
 * Affine domain shift x <- R(rotation) * (x .* scale) + translation, the
 * rotation acting on the first two coordinates. Empty translation means zero,
 * empty scale means all ones.
 */
struct ShiftSpec {
    double rotation = 0.0;  // radians
    std::vector<double> translation;
    std::vector<double> scale;

    void validate(std::size_t width) const;
    bool is_identity() const;
};

void apply_shift_inplace(Matrix& points, const ShiftSpec& shift);
Dataset apply_shift(const Dataset& samples, const ShiftSpec& shift);

struct GaussianDomainsSpec {
    std::size_t num_classes = 4;
    std::size_t width = 2;
    std::size_t per_class = 500;
    double radius = 2.0;
    double sigma = 0.35;
    ShiftSpec shift;
    std::uint64_t seed = 0;
};

/// Class centers on a radius-r circle in the first two coordinates, zeros elsewhere.
std::vector<std::vector<double>> circle_centers(std::size_t num_classes, std::size_t width, double radius);

/**
 * Isotropic Gaussian classes. The target set is drawn independently from the
 * same class distribution and then shifted. Both sets are labeled; samples are
 * grouped by class. Each (domain, class) pair has its own random substream.
 */
std::pair<Dataset, Dataset> gen_gaussian_domains(const GaussianDomainsSpec& spec);

} // namespace fgda
