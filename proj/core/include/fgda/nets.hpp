#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fgda/optim.hpp"
#include "fgda/tensor.hpp"

namespace fgda {

enum class Terminal { none, softmax };

/// Fully connected stack: widths = {input, hidden..., output}.
struct MlpArch {
    std::vector<std::size_t> widths;
    double slope = 0.2;
    Terminal terminal = Terminal::none;

    std::size_t input_width() const { return widths.front(); }
    std::size_t output_width() const { return widths.back(); }
    std::size_t layer_count() const { return widths.size() - 1; }
    void validate() const;

    bool operator==(const MlpArch&) const = default;
};

struct DenseLayer {
    Tensor weight;  // [in x out]
    Tensor bias;    // [out]
};

/// Uniform(-sqrt(1/fan_in), sqrt(1/fan_in)) weights, zero biases.
std::vector<DenseLayer> init_params(const MlpArch& arch, std::uint64_t seed);

class Mlp {
public:
    Mlp() = default;
    Mlp(MlpArch arch, std::uint64_t seed);
    Mlp(MlpArch arch, std::vector<DenseLayer> layers);

    static Mlp zeros(MlpArch arch);

    /// Hidden layers use leaky-ReLU; the last layer is linear, then the terminal activation.
    Tensor forward(const Tensor& x) const;

    const MlpArch& arch() const { return arch_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

    /// Handles to the live parameter tensors, named "<prefix>.<layer>.weight|bias".
    ParameterList parameters(const std::string& prefix) const;
    std::vector<Tensor> tensors() const;

    /// Deep copy with independent storage.
    Mlp clone() const;

private:
    MlpArch arch_;
    std::vector<DenseLayer> layers_;
};

/// Widths of the three networks, excluding the data-dependent ends.
struct NetConfig {
    std::vector<std::size_t> extractor_hidden = {64, 64};
    std::size_t feature_width = 16;
    std::vector<std::size_t> discriminator_hidden = {64, 32};
    double slope = 0.2;
};

/**
 * Feature extractor F, classifier C and domain discriminator D.
 *
 * D has 2 * domain_groups outputs: domain_groups == num_classes for the
 * class-aware discriminator, 1 for the plain binary one.
 */
struct ModelBundle {
    Mlp extractor;
    Mlp classifier;
    Mlp discriminator;
    std::size_t num_classes = 0;
    std::uint64_t seed = 0;

    static ModelBundle create(std::size_t input_width, std::size_t num_classes, const NetConfig& config,
                              std::uint64_t seed, bool class_aware_discriminator = true);

    std::size_t domain_groups() const { return discriminator.arch().output_width() / 2; }

    ParameterList task_parameters() const;
    ParameterList discriminator_parameters() const;

    ModelBundle clone() const;
    void validate() const;
};

/// Features f for a batch of inputs.
Tensor feature_extract(const Mlp& extractor, const Tensor& x);

/// Raw class logits z.
Tensor classify(const Mlp& classifier, const Tensor& features);

/**
 * Joint P(d, c | f) over 2G channels, normalized jointly. Channels [0, G) are
 * the source domain, [G, 2G) the target domain.
 */
Tensor discriminate(const Mlp& discriminator, const Tensor& features);

/// Sums a [n x 2G] joint into [n x 2] domain marginals P(d | f).
Tensor domain_marginal(const Tensor& joint);

/// Argmax class per row; ties go to the smallest index.
std::vector<int> predict(const ModelBundle& model, const Tensor& x);

} // namespace fgda
