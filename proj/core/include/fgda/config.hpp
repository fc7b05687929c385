#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fgda/analysis.hpp"
#include "fgda/datagen.hpp"
#include "fgda/encodings.hpp"
#include "fgda/nets.hpp"

namespace fgda {

/// How the adaptation stage aligns the domains.
enum class Strategy {
    source_only,  // keep training on the source task loss only
    binary,       // 2-channel domain discriminator
    hard,         // class-aware discriminator, thresholded one-hot knowledge
    soft,         // class-aware discriminator, tempered + clipped soft knowledge
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

enum class SourceEncoding { predicted, ground_truth };

/**
 * Everything a run needs besides the seed. Serialized as a flat JSON object
 * whose keys are the field names below; parsing is strict.
 */
struct TrainConfig {
    // synthetic data
    std::size_t num_classes = 4;
    std::size_t input_dim = 2;
    std::size_t per_class = 500;
    double radius = 2.0;
    double sigma = 0.35;
    double rotation_deg = 30.0;
    std::vector<double> translation = {0.5, 0.5};
    std::vector<double> scale;

    // schedule
    std::int64_t pretrain_iters = 2000;
    std::int64_t adapt_iters = 4000;
    std::int64_t distill_iters = 0;
    std::size_t batch_size = 64;
    std::size_t source_batch = 32;
    std::size_t target_batch = 32;

    // adversarial objective
    double lambda_adv = 0.001;
    Strategy strategy = Strategy::soft;
    double hard_threshold = 0.9;
    double temperature = 1.8;
    double clip = 0.9;
    SourceEncoding source_encoding = SourceEncoding::predicted;
    double distill_target_threshold = 0.0;  // 0 keeps every target sample

    // optimizers
    double sgd_lr = 2.5e-4;
    double sgd_momentum = 0.9;
    double sgd_weight_decay = 1e-4;
    double poly_power = 0.9;
    double adam_lr = 1e-4;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.99;
    double adam_eps = 1e-8;

    // networks
    std::vector<std::size_t> extractor_hidden = {64, 64};
    std::size_t feature_width = 16;
    std::vector<std::size_t> discriminator_hidden = {64, 32};
    double leaky_slope = 0.2;

    // bookkeeping
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    std::int64_t log_every = 0;
    std::int64_t checkpoint_every = 0;
    CcdScope ccd_scope = CcdScope::both;
    std::size_t dump_cap = 2000;

    /// Throws ValidationError describing every violated constraint.
    void validate() const;

    NetConfig net_config() const;
    KnowledgeOptions knowledge_options() const;
    GaussianDomainsSpec data_spec(std::uint64_t seed) const;
};

/// Strict parse: unknown keys and type mismatches raise ValidationError.
TrainConfig config_from_json(const std::string& text);
std::string config_to_json(const TrainConfig& config);

/// Names of every recognised config key, in serialization order.
std::vector<std::string> config_keys();

} // namespace fgda
