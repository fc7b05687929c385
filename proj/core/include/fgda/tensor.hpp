#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fgda {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);

class Tensor;
std::vector<Tensor> backward(const Tensor& loss);

namespace detail {

/// Receives the output gradient and adds contributions into the parents'
/// buffers. A buffer pointer is null when that parent does not need a gradient.
using BackwardFn =
    std::function<void(std::span<const double> out_grad, std::span<std::vector<double>*> parent_grads)>;

struct Node {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;
    bool has_grad = false;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    BackwardFn backward;
};

} // namespace detail

/**
 * Dense row-major array of doubles that can take part in a reverse-mode
 * computation graph.
 *
 * Tensor is a shared handle: copies alias the same storage, so a parameter
 * tensor held by a network and by an optimizer is one object. Graphs are
 * built implicitly by the free functions in ops.hpp and are released when
 * the last handle to the output goes away.
 */
class Tensor {
public:
    Tensor() = default;

    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const noexcept { return static_cast<bool>(node_); }

    const Shape& shape() const;
    std::size_t size() const;
    std::size_t rank() const { return shape().size(); }
    /// Leading dimension for rank 2, 1 for rank 1.
    std::size_t rows() const;
    /// Trailing dimension.
    std::size_t cols() const;

    std::span<const double> values() const;
    /// Direct write access. Only meaningful on leaves (parameters, inputs).
    std::span<double> mutable_values();
    double item() const;
    double at(std::size_t r, std::size_t c) const;

    bool requires_grad() const;
    void set_requires_grad(bool on);
    bool is_leaf() const;

    bool has_grad() const;
    std::span<const double> grad() const;
    /// Drops the accumulated gradient; has_grad() becomes false.
    void clear_grad();

    /// Same values, no graph history, no gradient requirement.
    Tensor detach() const;
    /// Deep copy of values into a fresh leaf.
    Tensor clone(bool requires_grad = false) const;

    bool same_node(const Tensor& other) const noexcept { return node_ == other.node_; }

    // Used by ops to wire graph nodes.
    static Tensor make_result(Shape shape, std::vector<double> values, std::vector<Tensor> inputs,
                              detail::BackwardFn backward);
    const std::shared_ptr<detail::Node>& node() const { return node_; }

private:
    friend std::vector<Tensor> backward(const Tensor& loss);

    explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

    std::shared_ptr<detail::Node> node_;
};

/**
 * Runs reverse-mode differentiation from a scalar and accumulates d(loss)/d(leaf)
 * into every reachable leaf that requires a gradient. Intermediate gradients are
 * not retained, so calling backward twice on the same graph adds the leaf
 * gradients twice.
 *
 * Returns the leaves that received a gradient, in first-visit order.
 */
std::vector<Tensor> backward(const Tensor& loss);

/// Temporarily disables gradient tracking on a set of tensors.
class FreezeGuard {
public:
    explicit FreezeGuard(std::vector<Tensor> tensors);
    ~FreezeGuard();

    FreezeGuard(const FreezeGuard&) = delete;
    FreezeGuard& operator=(const FreezeGuard&) = delete;

private:
    std::vector<Tensor> tensors_;
    std::vector<bool> previous_;
};

} // namespace fgda
