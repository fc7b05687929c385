#include "fgda/nets.hpp"

#include <cmath>

#include "fgda/errors.hpp"
#include "fgda/ops.hpp"
#include "fgda/random.hpp"

namespace fgda {

void MlpArch::validate() const {
    if (widths.size() < 2) throw ShapeError("MLP needs an input and an output width");
    for (auto w : widths) {
        if (w == 0) throw ShapeError("MLP widths must be positive");
    }
    if (!(slope >= 0.0 && slope < 1.0)) throw ParameterError("leaky-ReLU slope must lie in [0, 1)");
}

std::vector<DenseLayer> init_params(const MlpArch& arch, std::uint64_t seed) {
    arch.validate();
    Rng rng(seed);
    std::vector<DenseLayer> layers;
    layers.reserve(arch.layer_count());
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        const std::size_t in = arch.widths[l];
        const std::size_t out = arch.widths[l + 1];
        const double bound = std::sqrt(1.0 / static_cast<double>(in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        std::vector<double> w(in * out);
        for (auto& v : w) v = dist(rng);
        layers.push_back({Tensor::from({in, out}, std::move(w), true), Tensor::zeros({out}, true)});
    }
    return layers;
}

Mlp::Mlp(MlpArch arch, std::uint64_t seed) : arch_(std::move(arch)), layers_(init_params(arch_, seed)) {}

Mlp::Mlp(MlpArch arch, std::vector<DenseLayer> layers) : arch_(std::move(arch)), layers_(std::move(layers)) {
    arch_.validate();
    if (layers_.size() != arch_.layer_count()) throw ShapeError("layer count does not match architecture");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Shape expected_w{arch_.widths[l], arch_.widths[l + 1]};
        if (layers_[l].weight.shape() != expected_w || layers_[l].bias.size() != arch_.widths[l + 1]) {
            throw ShapeError("layer " + std::to_string(l) + " parameters do not match architecture");
        }
    }
}

Mlp Mlp::zeros(MlpArch arch) {
    arch.validate();
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        layers.push_back({Tensor::zeros({arch.widths[l], arch.widths[l + 1]}, true),
                          Tensor::zeros({arch.widths[l + 1]}, true)});
    }
    return Mlp(std::move(arch), std::move(layers));
}

Tensor Mlp::forward(const Tensor& x) const {
    if (x.rank() != 2 || x.cols() != arch_.input_width()) {
        throw ShapeError("network expects [n x " + std::to_string(arch_.input_width()) + "] input, got " +
                         shape_str(x.shape()));
    }
    Tensor h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        h = add_bias(matmul(h, layers_[l].weight), layers_[l].bias);
        if (l + 1 < layers_.size()) h = leaky_relu(h, arch_.slope);
    }
    if (arch_.terminal == Terminal::softmax) h = softmax_t(h, 1.0);
    return h;
}

ParameterList Mlp::parameters(const std::string& prefix) const {
    ParameterList out;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto base = prefix + "." + std::to_string(l);
        out.push_back({base + ".weight", layers_[l].weight});
        out.push_back({base + ".bias", layers_[l].bias});
    }
    return out;
}

std::vector<Tensor> Mlp::tensors() const {
    std::vector<Tensor> out;
    for (const auto& layer : layers_) {
        out.push_back(layer.weight);
        out.push_back(layer.bias);
    }
    return out;
}

Mlp Mlp::clone() const {
    std::vector<DenseLayer> copy;
    copy.reserve(layers_.size());
    for (const auto& layer : layers_) {
        copy.push_back({layer.weight.clone(layer.weight.requires_grad()), layer.bias.clone(layer.bias.requires_grad())});
    }
    return Mlp(arch_, std::move(copy));
}

ModelBundle ModelBundle::create(std::size_t input_width, std::size_t num_classes, const NetConfig& config,
                                std::uint64_t seed, bool class_aware_discriminator) {
    if (num_classes == 0) throw ParameterError("class count must be positive");
    MlpArch f_arch;
    f_arch.widths.push_back(input_width);
    f_arch.widths.insert(f_arch.widths.end(), config.extractor_hidden.begin(), config.extractor_hidden.end());
    f_arch.widths.push_back(config.feature_width);
    f_arch.slope = config.slope;

    MlpArch c_arch{{config.feature_width, num_classes}, config.slope, Terminal::none};

    MlpArch d_arch;
    d_arch.widths.push_back(config.feature_width);
    d_arch.widths.insert(d_arch.widths.end(), config.discriminator_hidden.begin(), config.discriminator_hidden.end());
    d_arch.widths.push_back(2 * (class_aware_discriminator ? num_classes : 1));
    d_arch.slope = config.slope;
    d_arch.terminal = Terminal::softmax;

    ModelBundle bundle;
    bundle.extractor = Mlp(f_arch, derive_seed(seed, "init.extractor"));
    bundle.classifier = Mlp(c_arch, derive_seed(seed, "init.classifier"));
    bundle.discriminator = Mlp(d_arch, derive_seed(seed, "init.discriminator"));
    bundle.num_classes = num_classes;
    bundle.seed = seed;
    bundle.validate();
    return bundle;
}

ParameterList ModelBundle::task_parameters() const {
    auto params = extractor.parameters("F");
    auto c = classifier.parameters("C");
    params.insert(params.end(), c.begin(), c.end());
    return params;
}

ParameterList ModelBundle::discriminator_parameters() const { return discriminator.parameters("D"); }

ModelBundle ModelBundle::clone() const {
    ModelBundle copy;
    copy.extractor = extractor.clone();
    copy.classifier = classifier.clone();
    copy.discriminator = discriminator.clone();
    copy.num_classes = num_classes;
    copy.seed = seed;
    return copy;
}

void ModelBundle::validate() const {
    const auto h = extractor.arch().output_width();
    if (classifier.arch().input_width() != h || discriminator.arch().input_width() != h) {
        throw ShapeError("classifier and discriminator inputs must equal the feature width");
    }
    if (classifier.arch().output_width() != num_classes) throw ShapeError("classifier output must equal class count");
    const auto d_out = discriminator.arch().output_width();
    if (d_out != 2 * num_classes && d_out != 2) {
        throw ShapeError("discriminator output must be 2K (class-aware) or 2 (binary)");
    }
    if (discriminator.arch().terminal != Terminal::softmax) throw ShapeError("discriminator must end in a joint softmax");
}

Tensor feature_extract(const Mlp& extractor, const Tensor& x) { return extractor.forward(x); }

Tensor classify(const Mlp& classifier, const Tensor& features) {
    if (classifier.arch().terminal != Terminal::none) throw ShapeError("classifier must emit raw logits");
    return classifier.forward(features);
}

Tensor discriminate(const Mlp& discriminator, const Tensor& features) {
    if (discriminator.arch().terminal != Terminal::softmax || discriminator.arch().output_width() % 2 != 0) {
        throw ShapeError("discriminator must have an even output width and a softmax terminal");
    }
    return discriminator.forward(features);
}

Tensor domain_marginal(const Tensor& joint) {
    if (joint.rank() != 2 || joint.cols() % 2 != 0) {
        throw ShapeError("domain_marginal expects [n x 2G], got " + shape_str(joint.shape()));
    }
    const std::size_t groups = joint.cols() / 2;
    std::vector<double> agg(joint.cols() * 2, 0.0);
    for (std::size_t c = 0; c < joint.cols(); ++c) agg[c * 2 + (c < groups ? 0 : 1)] = 1.0;
    return matmul(joint, Tensor::from({joint.cols(), 2}, std::move(agg)));
}

std::vector<int> predict(const ModelBundle& model, const Tensor& x) {
    const auto logits = classify(model.classifier, feature_extract(model.extractor, x));
    const std::size_t k = logits.cols();
    std::vector<int> out(logits.rows());
    auto v = logits.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < k; ++c)
            if (v[i * k + c] > v[i * k + best]) best = c;
        out[i] = static_cast<int>(best);
    }
    return out;
}

} // namespace fgda
