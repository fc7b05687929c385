#include "fgda/datagen.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "fgda/errors.hpp"
#include "fgda/random.hpp"

namespace fgda {

void ShiftSpec::validate(std::size_t width) const {
    if (!translation.empty() && translation.size() != width) {
        throw ParameterError("shift translation has " + std::to_string(translation.size()) +
                             " entries for width " + std::to_string(width));
    }
    if (!scale.empty() && scale.size() != width) {
        throw ParameterError("shift scale has " + std::to_string(scale.size()) + " entries for width " +
                             std::to_string(width));
    }
    for (double s : scale) {
        if (!(s > 0.0)) throw ParameterError("shift scale factors must be strictly positive");
    }
    if (rotation != 0.0 && width < 2) throw ParameterError("rotation needs at least two dimensions");
}

bool ShiftSpec::is_identity() const {
    if (rotation != 0.0) return false;
    for (double t : translation)
        if (t != 0.0) return false;
    for (double s : scale)
        if (s != 1.0) return false;
    return true;
}

void apply_shift_inplace(Matrix& points, const ShiftSpec& shift) {
    shift.validate(points.cols);
    if (shift.is_identity()) return;
    const double c = std::cos(shift.rotation);
    const double s = std::sin(shift.rotation);
    for (std::size_t i = 0; i < points.rows; ++i) {
        auto x = points.row(i);
        if (!shift.scale.empty())
            for (std::size_t d = 0; d < x.size(); ++d) x[d] *= shift.scale[d];
        if (shift.rotation != 0.0) {
            const double x0 = x[0], x1 = x[1];
            x[0] = c * x0 - s * x1;
            x[1] = s * x0 + c * x1;
        }
        if (!shift.translation.empty())
            for (std::size_t d = 0; d < x.size(); ++d) x[d] += shift.translation[d];
    }
}

Dataset apply_shift(const Dataset& samples, const ShiftSpec& shift) {
    Dataset out = samples;
    apply_shift_inplace(out.features, shift);
    return out;
}

std::vector<std::vector<double>> circle_centers(std::size_t num_classes, std::size_t width, double radius) {
    std::vector<std::vector<double>> centers(num_classes, std::vector<double>(width, 0.0));
    for (std::size_t k = 0; k < num_classes; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(num_classes);
        centers[k][0] = radius * std::cos(angle);
        centers[k][1] = radius * std::sin(angle);
    }
    return centers;
}

namespace {

Dataset sample_domain(const GaussianDomainsSpec& spec, Domain domain) {
    const auto centers = circle_centers(spec.num_classes, spec.width, spec.radius);
    Dataset out;
    out.features = Matrix(spec.num_classes * spec.per_class, spec.width);
    out.labels.reserve(out.features.rows);
    out.domains.assign(out.features.rows, domain);
    std::size_t row = 0;
    for (std::size_t k = 0; k < spec.num_classes; ++k) {
        const auto tag = (static_cast<std::uint64_t>(domain) << 32) | k;
        Rng rng(derive_seed(derive_seed(spec.seed, "datagen"), tag));
        std::normal_distribution<double> noise(0.0, 1.0);
        for (std::size_t n = 0; n < spec.per_class; ++n, ++row) {
            auto x = out.features.row(row);
            for (std::size_t d = 0; d < spec.width; ++d) {
                const double eps = noise(rng);
                x[d] = centers[k][d] + spec.sigma * eps;
            }
            out.labels.push_back(static_cast<int>(k));
        }
    }
    return out;
}

} // namespace

std::pair<Dataset, Dataset> gen_gaussian_domains(const GaussianDomainsSpec& spec) {
    if (spec.num_classes < 2) throw ParameterError("need at least two classes");
    if (spec.width < 2) throw ParameterError("need at least two feature dimensions");
    if (spec.per_class < 1) throw ParameterError("need at least one sample per class");
    if (!(spec.sigma >= 0.0)) throw ParameterError("noise sigma must be non-negative");
    spec.shift.validate(spec.width);

    auto source = sample_domain(spec, Domain::source);
    auto target = sample_domain(spec, Domain::target);
    apply_shift_inplace(target.features, spec.shift);
    return {std::move(source), std::move(target)};
}

} // namespace fgda
