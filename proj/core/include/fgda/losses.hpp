#pragma once

#include <cstddef>
#include <span>

#include "fgda/encodings.hpp"
#include "fgda/tensor.hpp"

namespace fgda {

/// A differentiable scalar plus the number of samples that contributed to it.
struct LossValue {
    Tensor value;
    std::size_t count = 0;

    double item() const { return value.item(); }
};

/// Batch-mean cross-entropy -sum_k y_k log p_k against integer labels.
LossValue seg_loss(const Tensor& probs, std::span<const int> labels);

/// -mean_s log P(d=0|f) - mean_t log P(d=1|f), inputs are [n x 2] domain posteriors.
LossValue binary_disc_loss(const Tensor& source_probs, const Tensor& target_probs);

/// -mean_t log P(d=0|f).
LossValue binary_adv_loss(const Tensor& target_probs);

/**
 * Class-aware discriminator objective
 *   -mean_{valid s} sum_k a_k log P(d=0,c=k|f) - mean_{valid t} sum_k a_k log P(d=1,c=k|f).
 * Masked samples count in neither numerator nor denominator. Throws
 * DegenerateBatchError("source"|"target") if a side has no valid sample.
 */
LossValue fg_disc_loss(const Tensor& source_joint, const EncodingBatch& source_enc, const Tensor& target_joint,
                       const EncodingBatch& target_enc);

/// Generator-side objective: target samples scored against the source channels of their own classes.
LossValue fg_adv_loss(const Tensor& target_joint, const EncodingBatch& target_enc);

/// T^2 * mean KL(softmax(teacher/T) || softmax(student/T)); teacher is a constant.
LossValue distill_loss(const Tensor& student_logits, const Tensor& teacher_logits, double temperature);

} // namespace fgda
