#include "fgda/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fgda/csv.hpp"
#include "fgda/errors.hpp"
#include "fgda/random.hpp"

namespace fgda {

std::size_t ClassCenters::present_count() const {
    return static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
}

ClassCenters class_centers(const Matrix& features, std::span<const int> labels, std::size_t num_classes) {
    if (labels.size() != features.rows) throw ShapeError("class_centers: label count does not match feature rows");
    const std::size_t h = features.cols;
    ClassCenters out{Matrix(num_classes, h), std::vector<std::size_t>(num_classes, 0),
                     std::vector<bool>(num_classes, false)};

    // Mean is accumulated relative to the first member of each class so that
    // identical points give a center equal to them bit for bit.
    std::vector<std::size_t> anchor(num_classes, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
            throw ParameterError("class_centers: label " + std::to_string(y) + " outside [0, K)");
        }
        const auto k = static_cast<std::size_t>(y);
        if (!out.present[k]) {
            out.present[k] = true;
            anchor[k] = i;
        }
        ++out.counts[k];
        auto x = features.row(i);
        auto a = features.row(anchor[k]);
        auto c = out.centers.row(k);
        for (std::size_t d = 0; d < h; ++d) c[d] += x[d] - a[d];
    }
    for (std::size_t k = 0; k < num_classes; ++k) {
        if (!out.present[k]) continue;
        auto c = out.centers.row(k);
        auto a = features.row(anchor[k]);
        for (std::size_t d = 0; d < h; ++d) c[d] = a[d] + c[d] / static_cast<double>(out.counts[k]);
    }
    return out;
}

CcdReport ccd(const Matrix& features, std::span<const int> labels, std::size_t num_classes) {
    const auto centers = class_centers(features, labels, num_classes);
    const std::size_t present = centers.present_count();
    if (present < 2) throw DataError("CCD needs at least two classes with samples");
    const std::size_t h = features.cols;

    std::vector<double> spread(num_classes, 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto k = static_cast<std::size_t>(labels[i]);
        auto x = features.row(i);
        auto mu = centers.centers.row(k);
        double d2 = 0.0;
        for (std::size_t d = 0; d < h; ++d) d2 += (x[d] - mu[d]) * (x[d] - mu[d]);
        spread[k] += d2;
    }

    CcdReport report;
    report.per_class.assign(num_classes, std::numeric_limits<double>::quiet_NaN());
    report.counts = centers.counts;
    report.feature_dim = h;
    double total = 0.0;
    for (std::size_t i = 0; i < num_classes; ++i) {
        if (!centers.present[i]) continue;
        const double intra = spread[i] / static_cast<double>(centers.counts[i]);
        double acc = 0.0;
        for (std::size_t j = 0; j < num_classes; ++j) {
            if (j == i || !centers.present[j]) continue;
            auto a = centers.centers.row(i);
            auto b = centers.centers.row(j);
            double inter = 0.0;
            for (std::size_t d = 0; d < h; ++d) inter += (a[d] - b[d]) * (a[d] - b[d]);
            if (inter < 1e-12) throw DegenerateGeometryError(static_cast<int>(i), static_cast<int>(j));
            acc += intra / inter;
        }
        report.per_class[i] = acc / static_cast<double>(present - 1);
        total += report.per_class[i];
    }
    report.mean = total / static_cast<double>(present);
    return report;
}

CcdReport ccd(const Dataset& features, std::size_t num_classes, CcdScope scope) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features.labels[i] == kUnlabeled) continue;
        if (scope == CcdScope::source && features.domains[i] != Domain::source) continue;
        if (scope == CcdScope::target && features.domains[i] != Domain::target) continue;
        keep.push_back(i);
    }
    const auto selected = features.subset(keep);
    return ccd(selected.features, selected.labels, num_classes);
}

Dataset extract_features(const ModelBundle& model, const Dataset& data, std::size_t cap, std::uint64_t seed) {
    if (data.width() != model.extractor.arch().input_width()) {
        throw ShapeError("dataset width " + std::to_string(data.width()) + " does not match extractor input " +
                         std::to_string(model.extractor.arch().input_width()));
    }
    std::vector<std::size_t> keep;
    for (Domain domain : {Domain::source, Domain::target}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data.domains[i] == domain) idx.push_back(i);
        if (cap > 0 && idx.size() > cap) {
            Rng rng(derive_seed(seed, domain == Domain::source ? "dump.source" : "dump.target"));
            std::shuffle(idx.begin(), idx.end(), rng);
            idx.resize(cap);
        }
        keep.insert(keep.end(), idx.begin(), idx.end());
    }
    std::sort(keep.begin(), keep.end());

    Dataset out;
    out.features = Matrix(keep.size(), model.extractor.arch().output_width());
    if (keep.empty()) return out;
    const auto features = [&] {
        FreezeGuard frozen(model.extractor.tensors());
        return model.extractor.forward(data.rows_tensor(keep));
    }();
    out.features = Matrix::from_tensor(features);
    for (auto i : keep) {
        out.labels.push_back(data.labels[i]);
        out.domains.push_back(data.domains[i]);
    }
    return out;
}

Dataset dump_features(const ModelBundle& model, const Dataset& data, const std::filesystem::path& path, std::size_t cap,
                      std::uint64_t seed) {
    auto out = extract_features(model, data, cap, seed);
    save_csv_dataset(out, path);
    return out;
}

} // namespace fgda
