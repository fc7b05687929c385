#include "fgda/dataset.hpp"

#include <algorithm>

#include "fgda/errors.hpp"

namespace fgda {

Matrix Matrix::from_tensor(const Tensor& t) {
    Matrix m(t.rows(), t.cols());
    auto v = t.values();
    std::copy(v.begin(), v.end(), m.data.begin());
    return m;
}

Tensor Matrix::to_tensor() const { return Tensor::from({rows, cols}, data); }

void Dataset::push_back(const Sample& s) {
    if (empty() && features.cols == 0) {
        features.cols = s.x.size();
    } else if (s.x.size() != features.cols) {
        throw ShapeError("sample width " + std::to_string(s.x.size()) + " does not match dataset width " +
                         std::to_string(features.cols));
    }
    features.data.insert(features.data.end(), s.x.begin(), s.x.end());
    ++features.rows;
    labels.push_back(s.label);
    domains.push_back(s.domain);
}

Sample Dataset::sample(std::size_t i) const {
    auto r = features.row(i);
    return {std::vector<double>(r.begin(), r.end()), labels[i], domains[i]};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.features = Matrix(indices.size(), features.cols);
    out.labels.reserve(indices.size());
    out.domains.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = features.row(indices[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels.push_back(labels[indices[i]]);
        out.domains.push_back(domains[indices[i]]);
    }
    return out;
}

Dataset Dataset::of_domain(Domain domain) const {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < size(); ++i)
        if (domains[i] == domain) keep.push_back(i);
    auto out = subset(keep);
    out.features.cols = features.cols;
    return out;
}

Dataset Dataset::without_labels() const {
    Dataset out = *this;
    std::fill(out.labels.begin(), out.labels.end(), kUnlabeled);
    return out;
}

bool Dataset::fully_labeled() const {
    return std::none_of(labels.begin(), labels.end(), [](int y) { return y == kUnlabeled; });
}

Tensor Dataset::rows_tensor(std::span<const std::size_t> indices) const {
    std::vector<double> values;
    values.reserve(indices.size() * width());
    for (auto i : indices) {
        auto r = features.row(i);
        values.insert(values.end(), r.begin(), r.end());
    }
    return Tensor::from({indices.size(), width()}, std::move(values));
}

Tensor Dataset::as_tensor() const { return features.to_tensor(); }

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.width() != b.width()) throw ShapeError("cannot concatenate datasets of different widths");
    Dataset out = a;
    out.features.data.insert(out.features.data.end(), b.features.data.begin(), b.features.data.end());
    out.features.rows += b.features.rows;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    out.domains.insert(out.domains.end(), b.domains.begin(), b.domains.end());
    return out;
}

} // namespace fgda
