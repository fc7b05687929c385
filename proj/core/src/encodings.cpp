#include "fgda/encodings.hpp"

#include <algorithm>
#include <cmath>

#include "fgda/errors.hpp"
#include "fgda/ops.hpp"

namespace fgda {

std::array<double, 2> binary_encoding(Domain domain) {
    return domain == Domain::source ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
}

ClassKnowledge hard_knowledge(std::span<const double> probs, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw ParameterError("hard-label threshold must lie in (0, 1]");
    if (probs.empty()) throw ParameterError("hard_knowledge: empty probability vector");
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw ParameterError("hard_knowledge: probabilities must be non-negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) throw ParameterError("hard_knowledge: probabilities do not sum to 1");

    const auto best = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    ClassKnowledge k{std::vector<double>(probs.size(), 0.0), false};
    if (probs[best] >= threshold) {
        k.a[best] = 1.0;
        k.valid = true;
    }
    return k;
}

ClassKnowledge soft_knowledge(std::span<const double> logits, double temperature, double clip) {
    if (!(temperature > 0.0)) throw ParameterError("soft-label temperature must be positive");
    if (!(clip > 0.0 && clip <= 1.0)) throw ParameterError("confidence clip must lie in (0, 1]");
    if (logits.empty()) throw ParameterError("soft_knowledge: empty logit vector");
    const auto z = Tensor::from({logits.size()}, std::vector<double>(logits.begin(), logits.end()));
    const auto softened = softmax_t(z, temperature);
    auto p = softened.values();

    ClassKnowledge k{std::vector<double>(p.begin(), p.end()), true};
    if (clip < 1.0) {
        double total = 0.0;
        for (auto& v : k.a) {
            v = std::min(v, clip);
            total += v;
        }
        for (auto& v : k.a) v /= total;
    }
    return k;
}

DomainEncoding domain_encoding(const ClassKnowledge& knowledge, Domain domain) {
    const std::size_t k = knowledge.a.size();
    DomainEncoding enc{std::vector<double>(2 * k, 0.0), domain, knowledge.valid};
    if (!knowledge.valid) return enc;
    const std::size_t offset = domain == Domain::source ? 0 : k;
    std::copy(knowledge.a.begin(), knowledge.a.end(), enc.e.begin() + static_cast<std::ptrdiff_t>(offset));
    return enc;
}

EncodingBatch pack_encodings(std::span<const DomainEncoding> encodings, Domain domain) {
    if (encodings.empty()) throw ShapeError("cannot pack an empty encoding batch");
    const std::size_t width = encodings.front().e.size();
    EncodingBatch batch;
    batch.domain = domain;
    std::vector<double> values;
    values.reserve(encodings.size() * width);
    for (const auto& enc : encodings) {
        if (enc.e.size() != width) throw ShapeError("encodings in one batch must share a width");
        if (enc.domain != domain) throw ParameterError("encoding domain does not match batch domain");
        values.insert(values.end(), enc.e.begin(), enc.e.end());
        batch.valid.push_back(enc.valid);
        if (enc.valid) ++batch.valid_count;
    }
    batch.targets = Tensor::from({encodings.size(), width}, std::move(values));
    return batch;
}

EncodingBatch encode_predictions(const Tensor& logits, Domain domain, const KnowledgeOptions& options) {
    const std::size_t n = logits.rows(), k = logits.cols();
    auto v = logits.values();
    std::vector<DomainEncoding> encodings;
    encodings.reserve(n);

    if (options.kind == KnowledgeKind::binary) {
        for (std::size_t i = 0; i < n; ++i) encodings.push_back(domain_encoding({{1.0}, true}, domain));
        return pack_encodings(encodings, domain);
    }

    Tensor probs;
    if (options.kind == KnowledgeKind::hard) probs = softmax_t(logits.detach(), 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        ClassKnowledge knowledge;
        if (options.kind == KnowledgeKind::hard) {
            knowledge = hard_knowledge(probs.values().subspan(i * k, k), options.threshold);
        } else {
            knowledge = soft_knowledge(v.subspan(i * k, k), options.temperature, options.clip);
        }
        encodings.push_back(domain_encoding(knowledge, domain));
    }
    return pack_encodings(encodings, domain);
}

EncodingBatch encode_labels(std::span<const int> labels, std::size_t num_classes, Domain domain) {
    std::vector<DomainEncoding> encodings;
    encodings.reserve(labels.size());
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
            throw ParameterError("label " + std::to_string(y) + " out of range for ground-truth encoding");
        }
        ClassKnowledge k{std::vector<double>(num_classes, 0.0), true};
        k.a[static_cast<std::size_t>(y)] = 1.0;
        encodings.push_back(domain_encoding(k, domain));
    }
    return pack_encodings(encodings, domain);
}

} // namespace fgda
