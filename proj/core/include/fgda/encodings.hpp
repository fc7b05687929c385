#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fgda/tensor.hpp"

namespace fgda {

enum class Domain : int { source = 0, target = 1 };

/// Class knowledge a for one sample. Invalid knowledge is all-zero and masked out of the losses.
struct ClassKnowledge {
    std::vector<double> a;
    bool valid = true;
};

/// [a; 0] for source, [0; a] for target.
struct DomainEncoding {
    std::vector<double> e;
    Domain domain = Domain::source;
    bool valid = true;
};

/// [1, 0] for source, [0, 1] for target.
std::array<double, 2> binary_encoding(Domain domain);

/**
 * One-hot at argmax(p) when max(p) >= threshold, else invalid. Ties pick the
 * smallest index. Throws ParameterError unless p is a distribution (to 1e-6)
 * and threshold lies in (0, 1].
 */
ClassKnowledge hard_knowledge(std::span<const double> probs, double threshold);

/**
 * softmax(z / T), each entry truncated at `clip`, then renormalized to sum 1.
 * With clip = 1 this is the plain tempered softmax. After renormalization an
 * entry can end up slightly above `clip`.
 */
ClassKnowledge soft_knowledge(std::span<const double> logits, double temperature, double clip);

DomainEncoding domain_encoding(const ClassKnowledge& knowledge, Domain domain);

/// Encodings for a batch, packed as a constant [n x 2G] tensor plus validity mask.
struct EncodingBatch {
    Tensor targets;
    std::vector<bool> valid;
    std::size_t valid_count = 0;
    Domain domain = Domain::source;
};

EncodingBatch pack_encodings(std::span<const DomainEncoding> encodings, Domain domain);

enum class KnowledgeKind { binary, hard, soft };

struct KnowledgeOptions {
    KnowledgeKind kind = KnowledgeKind::soft;
    double threshold = 0.9;    // hard
    double temperature = 1.8;  // soft
    double clip = 0.9;         // soft
};

/// Class knowledge from classifier logits, one row per sample. Logits are read, never differentiated.
EncodingBatch encode_predictions(const Tensor& logits, Domain domain, const KnowledgeOptions& options);

/// One-hot encodings from ground-truth labels (source side option).
EncodingBatch encode_labels(std::span<const int> labels, std::size_t num_classes, Domain domain);

} // namespace fgda
