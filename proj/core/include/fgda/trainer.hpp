#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fgda/analysis.hpp"
#include "fgda/config.hpp"
#include "fgda/dataset.hpp"
#include "fgda/nets.hpp"
#include "fgda/random.hpp"

namespace fgda {

/// Epoch-wise reshuffling index stream over [0, n).
class BatchSampler {
public:
    BatchSampler(std::size_t n, std::uint64_t seed);

    std::vector<std::size_t> next(std::size_t batch);

private:
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    Rng rng_;
};

/// Per-iteration values of every executed iteration.
struct LossTrace {
    std::vector<double> seg;
    std::vector<double> disc;
    std::vector<double> adv;
    std::vector<double> distill;
    std::vector<double> lr;

    std::size_t size() const { return lr.size(); }
};

struct StageResult {
    ModelBundle model;
    LossTrace trace;
    std::size_t skipped = 0;  // iterations dropped for degenerate batches
};

enum class AdaptPhase { discriminator, generator };

/// Called right after each backward pass of the adaptation loop, before the optimizer step.
using AdaptObserver = std::function<void(AdaptPhase, const ModelBundle&)>;

/// Called after every executed iteration with the stage name and 1-based iteration count.
using IterationCallback = std::function<void(const std::string& stage, std::int64_t iter, const ModelBundle&)>;

/// Source-only training of F and C with the task loss (SGD + poly). D is left at its initialization.
StageResult pretrain_source(const TrainConfig& config, const Dataset& source, std::uint64_t seed);
StageResult pretrain_source(const TrainConfig& config, const Dataset& source, ModelBundle model, std::uint64_t seed,
                            const IterationCallback& on_iter = {});

/**
 * Alternating adversarial adaptation. Each iteration:
 *   1. F, C frozen: D takes an Adam step on the discriminator loss;
 *   2. D frozen:    F, C take an SGD step on seg + lambda_adv * adv.
 * Encodings are recomputed from the current classifier every iteration and
 * treated as constants. Target labels are never read.
 *
 * If the model's discriminator does not match the strategy (2 vs 2K outputs)
 * it is replaced by a freshly initialized one.
 */
StageResult adapt(const TrainConfig& config, ModelBundle model, const Dataset& source, const Dataset& target,
                  std::uint64_t seed, const AdaptObserver& observer = {}, const IterationCallback& on_iter = {});

/**
 * Trains a freshly initialized student of the same architecture on the source
 * task loss plus distillation toward the frozen teacher's tempered outputs on
 * both domains.
 */
StageResult self_distill(const ModelBundle& teacher, const TrainConfig& config, const Dataset& source,
                         const Dataset& target, std::uint64_t seed, const IterationCallback& on_iter = {});

struct ClassMetrics {
    std::vector<double> per_class;  // NaN for classes without samples
    std::vector<std::size_t> counts;
    double mean = 0.0;              // over classes with samples
    double overall = 0.0;
};

/// Per-class recall of argmax predictions. Throws DataError on empty or unlabeled data.
ClassMetrics evaluate(const ModelBundle& model, const Dataset& data);
ClassMetrics class_accuracy(std::span<const int> predicted, std::span<const int> labels, std::size_t num_classes);

inline constexpr int kReportFormatVersion = 1;

struct RunReport {
    std::uint64_t seed = 0;
    TrainConfig config;
    LossTrace pretrain;
    LossTrace adapt;
    LossTrace distill;
    std::size_t skipped_iterations = 0;
    ClassMetrics source_metrics;
    ClassMetrics target_metrics;
    std::optional<ClassMetrics> teacher_target_metrics;
    CcdReport ccd;
    double wall_clock_seconds = 0.0;
};

std::string report_to_json(const RunReport& report);

struct RunOutput {
    ModelBundle model;
    RunReport report;
};

/**
 * Full run: pretrain, adapt (per strategy), optional self-distillation, then
 * evaluation on both labeled sets and CCD over extracted features. The target
 * set is passed with labels; training only sees an unlabeled view.
 */
RunOutput run_experiment(const TrainConfig& config, std::uint64_t seed, const Dataset& source, const Dataset& target,
                         const IterationCallback& on_iter = {});

/// Same as run_experiment but starts from an existing pretraining stage.
RunOutput run_from_pretrained(const TrainConfig& config, std::uint64_t seed, const Dataset& source,
                              const Dataset& target, const StageResult& pretrained,
                              const IterationCallback& on_iter = {});

} // namespace fgda
