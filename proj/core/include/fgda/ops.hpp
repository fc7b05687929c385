#pragma once

#include "fgda/tensor.hpp"

namespace fgda {

/// Floor applied inside log_clamped; probabilities below it contribute log(1e-12).
inline constexpr double kLogFloor = 1e-12;

/// [r x k] * [k x c] -> [r x c].
Tensor matmul(const Tensor& a, const Tensor& b);

/// Adds a length-c bias to every row of an [r x c] tensor.
Tensor add_bias(const Tensor& x, const Tensor& bias);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
/// Elementwise product; shapes must agree.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);

/// max(x, slope * x). At exactly 0 the slope branch is taken.
Tensor leaky_relu(const Tensor& x, double slope);

/**
 * Row-wise tempered softmax exp(z_k / T) / sum_j exp(z_j / T) along the last
 * dimension. Max-subtracted, so large logits do not overflow.
 */
Tensor softmax_t(const Tensor& z, double temperature);

/// log(max(x, floor)). No gradient flows through clamped entries.
Tensor log_clamped(const Tensor& x, double floor = kLogFloor);

/// Sum of all entries, as a [1] tensor.
Tensor sum(const Tensor& x);

/// Sums each row of an [r x c] tensor into an [r x 1] tensor.
Tensor row_sum(const Tensor& x);

} // namespace fgda
