#include "fgda/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fgda/errors.hpp"

namespace fgda {

using nlohmann::json;

namespace {

json arch_to_json(const MlpArch& arch) {
    return json{{"widths", arch.widths},
                {"slope", arch.slope},
                {"terminal", arch.terminal == Terminal::softmax ? "softmax" : "none"}};
}

MlpArch arch_from_json(const json& j) {
    MlpArch arch;
    arch.widths = j.at("widths").get<std::vector<std::size_t>>();
    arch.slope = j.at("slope").get<double>();
    const auto terminal = j.at("terminal").get<std::string>();
    if (terminal == "softmax") {
        arch.terminal = Terminal::softmax;
    } else if (terminal == "none") {
        arch.terminal = Terminal::none;
    } else {
        throw ParseError("unknown terminal activation '" + terminal + "'", 0);
    }
    return arch;
}

json mlp_to_json(const Mlp& net) {
    json layers = json::array();
    for (const auto& layer : net.layers()) {
        auto w = layer.weight.values();
        auto b = layer.bias.values();
        layers.push_back({{"weight", std::vector<double>(w.begin(), w.end())},
                          {"bias", std::vector<double>(b.begin(), b.end())}});
    }
    return json{{"arch", arch_to_json(net.arch())}, {"layers", layers}};
}

Mlp mlp_from_json(const json& j) {
    auto arch = arch_from_json(j.at("arch"));
    arch.validate();
    const auto& layers_json = j.at("layers");
    if (layers_json.size() != arch.layer_count()) throw ParseError("layer count does not match architecture", 0);
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        auto w = layers_json[l].at("weight").get<std::vector<double>>();
        auto b = layers_json[l].at("bias").get<std::vector<double>>();
        const std::size_t in = arch.widths[l], out = arch.widths[l + 1];
        if (w.size() != in * out || b.size() != out) {
            throw ParseError("layer " + std::to_string(l) + " parameter size mismatch", 0);
        }
        layers.push_back({Tensor::from({in, out}, std::move(w), true), Tensor::from({out}, std::move(b), true)});
    }
    return Mlp(std::move(arch), std::move(layers));
}

} // namespace

std::string checkpoint_to_string(const ModelBundle& model) {
    json doc{{"format_version", kCheckpointFormatVersion},
             {"num_classes", model.num_classes},
             {"seed", model.seed},
             {"extractor", mlp_to_json(model.extractor)},
             {"classifier", mlp_to_json(model.classifier)},
             {"discriminator", mlp_to_json(model.discriminator)}};
    return doc.dump(1);
}

ModelBundle checkpoint_from_string(const std::string& text) {
    try {
        const auto doc = json::parse(text);
        const int version = doc.at("format_version").get<int>();
        if (version != kCheckpointFormatVersion) {
            throw ParseError("unsupported checkpoint format version " + std::to_string(version), 0);
        }
        ModelBundle model;
        model.num_classes = doc.at("num_classes").get<std::size_t>();
        model.seed = doc.at("seed").get<std::uint64_t>();
        model.extractor = mlp_from_json(doc.at("extractor"));
        model.classifier = mlp_from_json(doc.at("classifier"));
        model.discriminator = mlp_from_json(doc.at("discriminator"));
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed checkpoint: ") + e.what(), 0);
    }
}

void save_checkpoint(const ModelBundle& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write checkpoint " + path.string());
    out << checkpoint_to_string(model) << '\n';
    if (!out) throw IoError("failed writing checkpoint " + path.string());
}

ModelBundle load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read checkpoint " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return checkpoint_from_string(buffer.str());
}

} // namespace fgda
