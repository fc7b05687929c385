#include "fgda/tensor.hpp"

#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fgda/errors.hpp"

namespace fgda {

std::string shape_str(const Shape& shape) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) out << 'x';
        out << shape[i];
    }
    out << ']';
    return out.str();
}

namespace {

std::size_t element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void check_shape(const Shape& shape, std::size_t n) {
    if (shape.empty()) throw ShapeError("tensor shape must have at least one dimension");
    for (auto d : shape) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
    }
    if (element_count(shape) != n) {
        throw ShapeError("shape " + shape_str(shape) + " does not match " + std::to_string(n) + " values");
    }
}

} // namespace

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
    check_shape(shape, values.size());
    auto node = std::make_shared<detail::Node>();
    node->shape = std::move(shape);
    node->values = std::move(values);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
    const auto n = element_count(shape);
    return from(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
    return from({1}, {value}, requires_grad);
}

const Shape& Tensor::shape() const { return node_->shape; }

std::size_t Tensor::size() const { return node_->values.size(); }

std::size_t Tensor::rows() const { return rank() == 1 ? 1 : shape().front(); }

std::size_t Tensor::cols() const { return shape().back(); }

std::span<const double> Tensor::values() const { return node_->values; }

std::span<double> Tensor::mutable_values() { return node_->values; }

double Tensor::item() const {
    if (size() != 1) throw ShapeError("item() on non-scalar tensor " + shape_str(shape()));
    return node_->values[0];
}

double Tensor::at(std::size_t r, std::size_t c) const { return node_->values[r * cols() + c]; }

bool Tensor::requires_grad() const { return node_->requires_grad; }

void Tensor::set_requires_grad(bool on) { node_->requires_grad = on; }

bool Tensor::is_leaf() const { return node_->parents.empty(); }

bool Tensor::has_grad() const { return node_->has_grad; }

std::span<const double> Tensor::grad() const {
    if (!node_->has_grad) return {};
    return node_->grad;
}

void Tensor::clear_grad() {
    node_->grad.clear();
    node_->has_grad = false;
}

Tensor Tensor::detach() const { return from(shape(), node_->values, false); }

Tensor Tensor::clone(bool requires_grad) const { return from(shape(), node_->values, requires_grad); }

Tensor Tensor::make_result(Shape shape, std::vector<double> values, std::vector<Tensor> inputs,
                           detail::BackwardFn backward_fn) {
    Tensor out = from(std::move(shape), std::move(values), false);
    bool any = false;
    for (const auto& in : inputs) any = any || in.requires_grad();
    if (!any) return out;
    out.node_->requires_grad = true;
    out.node_->backward = std::move(backward_fn);
    out.node_->parents.reserve(inputs.size());
    for (auto& in : inputs) out.node_->parents.push_back(in.node_);
    return out;
}

std::vector<Tensor> backward(const Tensor& loss) {
    if (!loss.defined() || loss.size() != 1) {
        throw ShapeError("backward requires a scalar loss, got " +
                         (loss.defined() ? shape_str(loss.shape()) : std::string("undefined")));
    }
    std::vector<Tensor> touched;
    if (!loss.requires_grad()) return touched;

    // Iterative post-order DFS; only nodes that require a gradient are visited.
    using NodePtr = detail::Node*;
    std::vector<NodePtr> order;
    std::unordered_set<NodePtr> seen;
    std::vector<std::pair<NodePtr, std::size_t>> stack;
    stack.emplace_back(loss.node().get(), 0);
    seen.insert(loss.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            NodePtr parent = node->parents[next++].get();
            if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    std::unordered_map<NodePtr, std::vector<double>> grads;
    grads[loss.node().get()] = {1.0};

    std::unordered_map<NodePtr, std::shared_ptr<detail::Node>> owners;
    std::vector<NodePtr> leaf_order;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodePtr node = *it;
        auto found = grads.find(node);
        if (found == grads.end()) continue;
        std::vector<double> out_grad = std::move(found->second);
        grads.erase(found);

        if (node->parents.empty()) {
            if (!node->has_grad) {
                node->grad.assign(node->values.size(), 0.0);
                node->has_grad = true;
            }
            for (std::size_t i = 0; i < out_grad.size(); ++i) node->grad[i] += out_grad[i];
            leaf_order.push_back(node);
            continue;
        }

        std::vector<std::vector<double>*> buffers(node->parents.size(), nullptr);
        for (std::size_t p = 0; p < node->parents.size(); ++p) {
            auto& parent = node->parents[p];
            if (!parent->requires_grad) continue;
            auto& buf = grads[parent.get()];
            if (buf.empty()) buf.assign(parent->values.size(), 0.0);
            buffers[p] = &buf;
            owners.emplace(parent.get(), parent);
        }
        node->backward(out_grad, buffers);
    }

    touched.reserve(leaf_order.size());
    for (NodePtr leaf : leaf_order) {
        if (leaf == loss.node().get()) {
            touched.push_back(loss);
        } else {
            touched.push_back(Tensor(owners.at(leaf)));
        }
    }
    return touched;
}

FreezeGuard::FreezeGuard(std::vector<Tensor> tensors) : tensors_(std::move(tensors)) {
    previous_.reserve(tensors_.size());
    for (auto& t : tensors_) {
        previous_.push_back(t.requires_grad());
        t.set_requires_grad(false);
    }
}

FreezeGuard::~FreezeGuard() {
    for (std::size_t i = 0; i < tensors_.size(); ++i) tensors_[i].set_requires_grad(previous_[i]);
}

} // namespace fgda
