#include "fgda/losses.hpp"

#include "fgda/errors.hpp"
#include "fgda/ops.hpp"

namespace fgda {

namespace {

// -sum(targets * log probs) / denominator
Tensor weighted_nll(const Tensor& probs, const Tensor& targets, std::size_t denominator) {
    return scale(sum(mul(targets, log_clamped(probs))), -1.0 / static_cast<double>(denominator));
}

Tensor domain_targets(std::size_t rows, Domain domain) {
    const auto code = binary_encoding(domain);
    std::vector<double> values(rows * 2);
    for (std::size_t i = 0; i < rows; ++i) {
        values[2 * i] = code[0];
        values[2 * i + 1] = code[1];
    }
    return Tensor::from({rows, 2}, std::move(values));
}

void require_posteriors(const Tensor& probs, const char* what) {
    if (probs.rank() != 2 || probs.cols() != 2) {
        throw ShapeError(std::string(what) + " must be [n x 2], got " + shape_str(probs.shape()));
    }
}

void require_matching(const Tensor& joint, const EncodingBatch& enc, Domain domain, const char* side) {
    if (joint.rank() != 2 || !enc.targets.defined() || joint.shape() != enc.targets.shape()) {
        throw ShapeError(std::string(side) + " joint and encodings disagree in shape");
    }
    if (enc.domain != domain) throw ParameterError(std::string(side) + " encodings carry the wrong domain");
    if (enc.valid_count == 0) throw DegenerateBatchError(side);
}

} // namespace

LossValue seg_loss(const Tensor& probs, std::span<const int> labels) {
    if (probs.rank() != 2 || probs.rows() != labels.size()) {
        throw ShapeError("seg_loss: probabilities " + shape_str(probs.shape()) + " vs " +
                         std::to_string(labels.size()) + " labels");
    }
    const std::size_t n = probs.rows(), k = probs.cols();
    std::vector<double> onehot(n * k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= k) {
            throw ParameterError("seg_loss: label " + std::to_string(y) + " out of range");
        }
        onehot[i * k + static_cast<std::size_t>(y)] = 1.0;
    }
    return {weighted_nll(probs, Tensor::from({n, k}, std::move(onehot)), n), n};
}

LossValue binary_disc_loss(const Tensor& source_probs, const Tensor& target_probs) {
    require_posteriors(source_probs, "source posteriors");
    require_posteriors(target_probs, "target posteriors");
    const auto ns = source_probs.rows(), nt = target_probs.rows();
    auto value = add(weighted_nll(source_probs, domain_targets(ns, Domain::source), ns),
                     weighted_nll(target_probs, domain_targets(nt, Domain::target), nt));
    return {value, ns + nt};
}

LossValue binary_adv_loss(const Tensor& target_probs) {
    require_posteriors(target_probs, "target posteriors");
    const auto nt = target_probs.rows();
    return {weighted_nll(target_probs, domain_targets(nt, Domain::source), nt), nt};
}

LossValue fg_disc_loss(const Tensor& source_joint, const EncodingBatch& source_enc, const Tensor& target_joint,
                       const EncodingBatch& target_enc) {
    require_matching(source_joint, source_enc, Domain::source, "source");
    require_matching(target_joint, target_enc, Domain::target, "target");
    auto value = add(weighted_nll(source_joint, source_enc.targets, source_enc.valid_count),
                     weighted_nll(target_joint, target_enc.targets, target_enc.valid_count));
    return {value, source_enc.valid_count + target_enc.valid_count};
}

LossValue fg_adv_loss(const Tensor& target_joint, const EncodingBatch& target_enc) {
    require_matching(target_joint, target_enc, Domain::target, "target");
    // [0; a] -> [a; 0]
    const std::size_t n = target_joint.rows(), width = target_joint.cols(), groups = width / 2;
    auto enc = target_enc.targets.values();
    std::vector<double> flipped(n * width, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < groups; ++c) flipped[i * width + c] = enc[i * width + groups + c];
    return {weighted_nll(target_joint, Tensor::from({n, width}, std::move(flipped)), target_enc.valid_count),
            target_enc.valid_count};
}

LossValue distill_loss(const Tensor& student_logits, const Tensor& teacher_logits, double temperature) {
    if (student_logits.shape() != teacher_logits.shape() || student_logits.rank() != 2) {
        throw ShapeError("distill_loss: student " + shape_str(student_logits.shape()) + " vs teacher " +
                         shape_str(teacher_logits.shape()));
    }
    const auto teacher = softmax_t(teacher_logits.detach(), temperature);
    const auto student = softmax_t(student_logits, temperature);
    const auto n = student_logits.rows();
    // KL = sum q log q - sum q log p; both terms through the same clamped log.
    auto kl = sub(sum(mul(teacher, log_clamped(teacher))), sum(mul(teacher, log_clamped(student))));
    return {scale(kl, temperature * temperature / static_cast<double>(n)), n};
}

} // namespace fgda
