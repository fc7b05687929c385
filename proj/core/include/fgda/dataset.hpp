#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fgda/encodings.hpp"
#include "fgda/tensor.hpp"

namespace fgda {

/// Label sentinel for samples whose class is hidden.
inline constexpr int kUnlabeled = -1;

/// Row-major feature matrix without graph machinery.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }

    static Matrix from_tensor(const Tensor& t);
    Tensor to_tensor() const;
};

struct Sample {
    std::vector<double> x;
    int label = kUnlabeled;
    Domain domain = Domain::source;
};

/// Structure-of-arrays sample collection; one row of `features` per sample.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<Domain> domains;

    std::size_t size() const { return labels.size(); }
    std::size_t width() const { return features.cols; }
    bool empty() const { return labels.empty(); }

    void push_back(const Sample& s);
    Sample sample(std::size_t i) const;

    Dataset subset(std::span<const std::size_t> indices) const;
    Dataset of_domain(Domain domain) const;
    /// Training view: same samples, every label replaced by kUnlabeled.
    Dataset without_labels() const;
    bool fully_labeled() const;

    /// Rows as a constant [n x m] tensor.
    Tensor rows_tensor(std::span<const std::size_t> indices) const;
    Tensor as_tensor() const;

    static Dataset concat(const Dataset& a, const Dataset& b);
};

} // namespace fgda
