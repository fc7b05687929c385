#include "fgda/config.hpp"

#include <functional>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "fgda/errors.hpp"

namespace fgda {

using nlohmann::json;

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::source_only: return "source_only";
        case Strategy::binary: return "binary";
        case Strategy::hard: return "hard";
        case Strategy::soft: return "soft";
    }
    return "unknown";
}

Strategy strategy_from_string(const std::string& name) {
    if (name == "source_only") return Strategy::source_only;
    if (name == "binary") return Strategy::binary;
    if (name == "hard") return Strategy::hard;
    if (name == "soft") return Strategy::soft;
    throw ValidationError("unknown strategy '" + name + "' (expected source_only, binary, hard or soft)");
}

namespace {

std::string to_string(SourceEncoding e) { return e == SourceEncoding::predicted ? "predicted" : "ground_truth"; }

SourceEncoding source_encoding_from_string(const std::string& name) {
    if (name == "predicted") return SourceEncoding::predicted;
    if (name == "ground_truth") return SourceEncoding::ground_truth;
    throw ValidationError("unknown source_encoding '" + name + "' (expected predicted or ground_truth)");
}

std::string to_string(CcdScope s) {
    switch (s) {
        case CcdScope::both: return "both";
        case CcdScope::source: return "source";
        case CcdScope::target: return "target";
    }
    return "both";
}

CcdScope scope_from_string(const std::string& name) {
    if (name == "both") return CcdScope::both;
    if (name == "source") return CcdScope::source;
    if (name == "target") return CcdScope::target;
    throw ValidationError("unknown ccd_scope '" + name + "' (expected both, source or target)");
}

struct Field {
    const char* key;
    std::function<json(const TrainConfig&)> get;
    std::function<void(TrainConfig&, const json&)> set;
};

template <typename T>
Field plain(const char* key, T TrainConfig::*member) {
    return {key, [member](const TrainConfig& c) { return json(c.*member); },
            [member](TrainConfig& c, const json& j) { c.*member = j.get<T>(); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        plain("num_classes", &TrainConfig::num_classes),
        plain("input_dim", &TrainConfig::input_dim),
        plain("per_class", &TrainConfig::per_class),
        plain("radius", &TrainConfig::radius),
        plain("sigma", &TrainConfig::sigma),
        plain("rotation_deg", &TrainConfig::rotation_deg),
        plain("translation", &TrainConfig::translation),
        plain("scale", &TrainConfig::scale),
        plain("pretrain_iters", &TrainConfig::pretrain_iters),
        plain("adapt_iters", &TrainConfig::adapt_iters),
        plain("distill_iters", &TrainConfig::distill_iters),
        plain("batch_size", &TrainConfig::batch_size),
        plain("source_batch", &TrainConfig::source_batch),
        plain("target_batch", &TrainConfig::target_batch),
        plain("lambda_adv", &TrainConfig::lambda_adv),
        {"strategy", [](const TrainConfig& c) { return json(to_string(c.strategy)); },
         [](TrainConfig& c, const json& j) { c.strategy = strategy_from_string(j.get<std::string>()); }},
        plain("hard_threshold", &TrainConfig::hard_threshold),
        plain("temperature", &TrainConfig::temperature),
        plain("clip", &TrainConfig::clip),
        {"source_encoding", [](const TrainConfig& c) { return json(to_string(c.source_encoding)); },
         [](TrainConfig& c, const json& j) { c.source_encoding = source_encoding_from_string(j.get<std::string>()); }},
        plain("distill_target_threshold", &TrainConfig::distill_target_threshold),
        plain("sgd_lr", &TrainConfig::sgd_lr),
        plain("sgd_momentum", &TrainConfig::sgd_momentum),
        plain("sgd_weight_decay", &TrainConfig::sgd_weight_decay),
        plain("poly_power", &TrainConfig::poly_power),
        plain("adam_lr", &TrainConfig::adam_lr),
        plain("adam_beta1", &TrainConfig::adam_beta1),
        plain("adam_beta2", &TrainConfig::adam_beta2),
        plain("adam_eps", &TrainConfig::adam_eps),
        plain("extractor_hidden", &TrainConfig::extractor_hidden),
        plain("feature_width", &TrainConfig::feature_width),
        plain("discriminator_hidden", &TrainConfig::discriminator_hidden),
        plain("leaky_slope", &TrainConfig::leaky_slope),
        plain("seeds", &TrainConfig::seeds),
        plain("log_every", &TrainConfig::log_every),
        plain("checkpoint_every", &TrainConfig::checkpoint_every),
        {"ccd_scope", [](const TrainConfig& c) { return json(to_string(c.ccd_scope)); },
         [](TrainConfig& c, const json& j) { c.ccd_scope = scope_from_string(j.get<std::string>()); }},
        plain("dump_cap", &TrainConfig::dump_cap),
    };
    return table;
}

} // namespace

void TrainConfig::validate() const {
    std::vector<std::string> problems;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) problems.push_back(msg);
    };
    check(num_classes >= 1, "num_classes must be at least 1");
    check(input_dim >= 1, "input_dim must be at least 1");
    check(per_class >= 1, "per_class must be at least 1");
    check(radius > 0.0, "radius must be positive");
    check(sigma >= 0.0, "sigma must be non-negative");
    check(translation.empty() || translation.size() == input_dim, "translation must be empty or have input_dim entries");
    check(scale.empty() || scale.size() == input_dim, "scale must be empty or have input_dim entries");
    for (double s : scale) check(s > 0.0, "scale factors must be strictly positive");
    check(pretrain_iters >= 0 && adapt_iters >= 0 && distill_iters >= 0, "iteration counts must be non-negative");
    check(source_batch >= 1 && target_batch >= 1, "per-domain batch sizes must be at least 1");
    check(source_batch + target_batch == batch_size, "source_batch + target_batch must equal batch_size");
    check(lambda_adv >= 0.0, "lambda_adv must be non-negative");
    check(hard_threshold > 0.0 && hard_threshold <= 1.0, "hard_threshold must lie in (0, 1]");
    check(temperature > 0.0, "temperature must be positive");
    check(clip > 0.0 && clip <= 1.0, "clip must lie in (0, 1]");
    check(distill_target_threshold >= 0.0 && distill_target_threshold <= 1.0,
          "distill_target_threshold must lie in [0, 1]");
    check(sgd_lr >= 0.0 && adam_lr >= 0.0, "learning rates must be non-negative");
    check(sgd_momentum >= 0.0 && sgd_momentum < 1.0, "sgd_momentum must lie in [0, 1)");
    check(sgd_weight_decay >= 0.0, "sgd_weight_decay must be non-negative");
    check(poly_power > 0.0, "poly_power must be positive");
    check(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0,
          "adam betas must lie in [0, 1)");
    check(adam_eps > 0.0, "adam_eps must be positive");
    check(feature_width >= 1, "feature_width must be positive");
    for (auto w : extractor_hidden) check(w >= 1, "extractor_hidden widths must be positive");
    for (auto w : discriminator_hidden) check(w >= 1, "discriminator_hidden widths must be positive");
    check(leaky_slope >= 0.0 && leaky_slope < 1.0, "leaky_slope must lie in [0, 1)");
    check(!seeds.empty(), "seeds must not be empty");
    check(log_every >= 0 && checkpoint_every >= 0, "log/checkpoint cadence must be non-negative");
    check(rotation_deg == 0.0 || input_dim >= 2, "rotation needs input_dim >= 2");

    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid config:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw ValidationError(msg.str());
    }
}

NetConfig TrainConfig::net_config() const {
    return NetConfig{extractor_hidden, feature_width, discriminator_hidden, leaky_slope};
}

KnowledgeOptions TrainConfig::knowledge_options() const {
    KnowledgeOptions opts;
    opts.kind = strategy == Strategy::hard ? KnowledgeKind::hard
                : strategy == Strategy::soft ? KnowledgeKind::soft
                                             : KnowledgeKind::binary;
    opts.threshold = hard_threshold;
    opts.temperature = temperature;
    opts.clip = clip;
    return opts;
}

GaussianDomainsSpec TrainConfig::data_spec(std::uint64_t seed) const {
    GaussianDomainsSpec spec;
    spec.num_classes = num_classes;
    spec.width = input_dim;
    spec.per_class = per_class;
    spec.radius = radius;
    spec.sigma = sigma;
    spec.shift.rotation = rotation_deg * std::numbers::pi / 180.0;
    spec.shift.translation = translation;
    spec.shift.scale = scale;
    spec.seed = seed;
    return spec;
}

TrainConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config must be a JSON object");

    std::vector<std::string> unknown;
    for (const auto& [key, _] : doc.items()) {
        bool known = false;
        for (const auto& f : fields()) known = known || key == f.key;
        if (!known) unknown.push_back(key);
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw ValidationError(msg);
    }

    TrainConfig config;
    for (const auto& f : fields()) {
        if (!doc.contains(f.key)) continue;
        try {
            f.set(config, doc.at(f.key));
        } catch (const json::exception& e) {
            throw ValidationError(std::string("bad value for '") + f.key + "': " + e.what());
        }
    }
    config.validate();
    return config;
}

std::string config_to_json(const TrainConfig& config) {
    json doc = json::object();
    for (const auto& f : fields()) doc[f.key] = f.get(config);
    return doc.dump(2);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.emplace_back(f.key);
    return keys;
}

} // namespace fgda
