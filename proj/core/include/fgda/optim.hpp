#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fgda/tensor.hpp"

namespace fgda {

struct NamedParameter {
    std::string name;
    Tensor tensor;
};

using ParameterList = std::vector<NamedParameter>;

void clear_grads(const ParameterList& params);

struct SgdOptions {
    double momentum = 0.9;
    double weight_decay = 1e-4;
};

struct AdamOptions {
    double beta1 = 0.9;
    double beta2 = 0.99;
    double eps = 1e-8;
};

enum class OptimKind { sgd_momentum, adam };

/**
 * Per-parameter optimizer slots. For SGD `first` is the velocity; for Adam
 * `first` / `second` are the raw moment estimates and `step` counts updates.
 */
struct OptimState {
    OptimKind kind = OptimKind::sgd_momentum;
    SgdOptions sgd;
    AdamOptions adam;
    std::vector<std::vector<double>> first;
    std::vector<std::vector<double>> second;
    std::int64_t step = 0;

    static OptimState make_sgd(const ParameterList& params, SgdOptions options = {});
    static OptimState make_adam(const ParameterList& params, AdamOptions options = {});
};

/**
 * v <- momentum * v + g + weight_decay * theta;  theta <- theta - lr * v.
 * A parameter without a gradient is treated as having a zero gradient.
 * Throws NumericError naming the parameter if any gradient entry is NaN.
 */
void sgd_step(ParameterList& params, OptimState& state, double lr);

/// Bias-corrected Adam. Same gradient conventions as sgd_step.
void adam_step(ParameterList& params, OptimState& state, double lr);

/// base * (1 - iter / total)^power, for 0 <= iter <= total.
double poly_lr(std::int64_t iter, std::int64_t total, double base, double power);

} // namespace fgda
