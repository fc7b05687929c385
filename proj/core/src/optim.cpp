#include "fgda/optim.hpp"

#include <cmath>

#include "fgda/errors.hpp"

namespace fgda {

void clear_grads(const ParameterList& params) {
    for (auto p : params) p.tensor.clear_grad();
}

namespace {

std::vector<std::vector<double>> zero_slots(const ParameterList& params) {
    std::vector<std::vector<double>> slots;
    slots.reserve(params.size());
    for (const auto& p : params) slots.emplace_back(p.tensor.size(), 0.0);
    return slots;
}

void check_state(const ParameterList& params, const OptimState& state, OptimKind kind) {
    if (state.kind != kind) throw ParameterError("optimizer state kind does not match the update rule");
    if (state.first.size() != params.size()) throw ShapeError("optimizer state does not match parameter list");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (state.first[i].size() != params[i].tensor.size()) {
            throw ShapeError("optimizer slot for '" + params[i].name + "' has the wrong size");
        }
    }
}

void check_finite(const NamedParameter& p) {
    for (double g : p.tensor.grad()) {
        if (std::isnan(g)) throw NumericError("NaN gradient in parameter '" + p.name + "'");
    }
}

} // namespace

OptimState OptimState::make_sgd(const ParameterList& params, SgdOptions options) {
    OptimState state;
    state.kind = OptimKind::sgd_momentum;
    state.sgd = options;
    state.first = zero_slots(params);
    return state;
}

OptimState OptimState::make_adam(const ParameterList& params, AdamOptions options) {
    OptimState state;
    state.kind = OptimKind::adam;
    state.adam = options;
    state.first = zero_slots(params);
    state.second = zero_slots(params);
    return state;
}

void sgd_step(ParameterList& params, OptimState& state, double lr) {
    check_state(params, state, OptimKind::sgd_momentum);
    for (const auto& p : params) check_finite(p);
    const double mu = state.sgd.momentum;
    const double wd = state.sgd.weight_decay;
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto theta = params[i].tensor.mutable_values();
        auto grad = params[i].tensor.grad();
        auto& v = state.first[i];
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double g = grad.empty() ? 0.0 : grad[j];
            v[j] = mu * v[j] + g + wd * theta[j];
            theta[j] -= lr * v[j];
        }
    }
    ++state.step;
}

void adam_step(ParameterList& params, OptimState& state, double lr) {
    check_state(params, state, OptimKind::adam);
    for (const auto& p : params) check_finite(p);
    const auto& opt = state.adam;
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(opt.beta1, t);
    const double correction2 = 1.0 - std::pow(opt.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto theta = params[i].tensor.mutable_values();
        auto grad = params[i].tensor.grad();
        auto& m = state.first[i];
        auto& v = state.second[i];
        for (std::size_t j = 0; j < theta.size(); ++j) {
            const double g = grad.empty() ? 0.0 : grad[j];
            m[j] = opt.beta1 * m[j] + (1.0 - opt.beta1) * g;
            v[j] = opt.beta2 * v[j] + (1.0 - opt.beta2) * g * g;
            const double m_hat = m[j] / correction1;
            const double v_hat = v[j] / correction2;
            theta[j] -= lr * m_hat / (std::sqrt(v_hat) + opt.eps);
        }
    }
}

double poly_lr(std::int64_t iter, std::int64_t total, double base, double power) {
    if (total <= 0) throw ParameterError("poly_lr: total iterations must be positive");
    if (iter < 0 || iter > total) {
        throw ParameterError("poly_lr: iteration " + std::to_string(iter) + " outside [0, " + std::to_string(total) + "]");
    }
    return base * std::pow(1.0 - static_cast<double>(iter) / static_cast<double>(total), power);
}

} // namespace fgda
