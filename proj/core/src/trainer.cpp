#include "fgda/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "fgda/errors.hpp"
#include "fgda/losses.hpp"
#include "fgda/ops.hpp"
#include "fgda/optim.hpp"

namespace fgda {

BatchSampler::BatchSampler(std::size_t n, std::uint64_t seed) : order_(n), rng_(seed) {
    if (n == 0) throw DataError("cannot sample batches from an empty dataset");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::shuffle(order_.begin(), order_.end(), rng_);
}

std::vector<std::size_t> BatchSampler::next(std::size_t batch) {
    std::vector<std::size_t> out;
    out.reserve(batch);
    while (out.size() < batch) {
        if (cursor_ == order_.size()) {
            std::shuffle(order_.begin(), order_.end(), rng_);
            cursor_ = 0;
        }
        out.push_back(order_[cursor_++]);
    }
    return out;
}

namespace {

std::vector<int> gather_labels(const Dataset& data, std::span<const std::size_t> idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(data.labels[i]);
    return out;
}

void require_labeled_source(const Dataset& source, std::size_t num_classes) {
    if (source.empty()) throw DataError("source set is empty");
    for (int y : source.labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
            throw DataError("source samples must carry labels in [0, " + std::to_string(num_classes) + ")");
        }
    }
}

std::vector<Tensor> all_tensors(const ModelBundle& m) {
    auto out = m.extractor.tensors();
    auto c = m.classifier.tensors();
    auto d = m.discriminator.tensors();
    out.insert(out.end(), c.begin(), c.end());
    out.insert(out.end(), d.begin(), d.end());
    return out;
}

std::vector<Tensor> task_tensors(const ModelBundle& m) {
    auto out = m.extractor.tensors();
    auto c = m.classifier.tensors();
    out.insert(out.end(), c.begin(), c.end());
    return out;
}

Tensor task_probs(const ModelBundle& m, const Tensor& x) {
    return softmax_t(classify(m.classifier, feature_extract(m.extractor, x)), 1.0);
}

SgdOptions sgd_options(const TrainConfig& c) { return {c.sgd_momentum, c.sgd_weight_decay}; }
AdamOptions adam_options(const TrainConfig& c) { return {c.adam_beta1, c.adam_beta2, c.adam_eps}; }

// Replace D when its output width does not match what the strategy needs.
void fit_discriminator(ModelBundle& model, const TrainConfig& config, std::uint64_t seed) {
    const bool class_aware = config.strategy == Strategy::hard || config.strategy == Strategy::soft;
    const std::size_t groups = class_aware ? model.num_classes : 1;
    if (model.domain_groups() == groups) return;
    const auto fresh = ModelBundle::create(model.extractor.arch().input_width(), model.num_classes,
                                           config.net_config(), seed, class_aware);
    model.discriminator = fresh.discriminator;
}

// One SGD step of the task loss on a source batch. Shared by pretraining and
// the source-only adaptation baseline so the two follow the same arithmetic.
double source_step(ModelBundle& model, ParameterList& params, OptimState& state, const Dataset& source,
                   std::span<const std::size_t> idx, double lr) {
    const auto labels = gather_labels(source, idx);
    clear_grads(params);
    const auto loss = seg_loss(task_probs(model, source.rows_tensor(idx)), labels);
    backward(loss.value);
    sgd_step(params, state, lr);
    clear_grads(params);
    return loss.item();
}

} // namespace

StageResult pretrain_source(const TrainConfig& config, const Dataset& source, std::uint64_t seed) {
    const bool class_aware = config.strategy != Strategy::binary;
    auto model = ModelBundle::create(source.width(), config.num_classes, config.net_config(), seed, class_aware);
    return pretrain_source(config, source, std::move(model), seed);
}

StageResult pretrain_source(const TrainConfig& config, const Dataset& source, ModelBundle model, std::uint64_t seed,
                            const IterationCallback& on_iter) {
    require_labeled_source(source, model.num_classes);
    StageResult result{std::move(model), {}, 0};
    auto& m = result.model;
    auto params = m.task_parameters();
    auto state = OptimState::make_sgd(params, sgd_options(config));
    BatchSampler sampler(source.size(), derive_seed(seed, "pretrain.source"));
    const auto total = config.pretrain_iters;
    for (std::int64_t it = 0; it < total; ++it) {
        const double lr = poly_lr(it, total, config.sgd_lr, config.poly_power);
        const auto idx = sampler.next(config.source_batch);
        result.trace.seg.push_back(source_step(m, params, state, source, idx, lr));
        result.trace.lr.push_back(lr);
        if (on_iter) on_iter("pretrain", it + 1, m);
    }
    return result;
}

StageResult adapt(const TrainConfig& config, ModelBundle model, const Dataset& source, const Dataset& target,
                  std::uint64_t seed, const AdaptObserver& observer, const IterationCallback& on_iter) {
    require_labeled_source(source, model.num_classes);
    if (target.empty()) throw DataError("target set is empty");
    fit_discriminator(model, config, seed);

    StageResult result{std::move(model), {}, 0};
    auto& m = result.model;
    auto g_params = m.task_parameters();
    auto d_params = m.discriminator_parameters();
    auto sgd = OptimState::make_sgd(g_params, sgd_options(config));
    auto adam = OptimState::make_adam(d_params, adam_options(config));
    const auto g_tensors = task_tensors(m);
    const auto d_tensors = m.discriminator.tensors();
    const auto knowledge = config.knowledge_options();

    BatchSampler source_sampler(source.size(), derive_seed(seed, "adapt.source"));
    BatchSampler target_sampler(target.size(), derive_seed(seed, "adapt.target"));

    const auto total = config.adapt_iters;
    for (std::int64_t it = 0; it < total; ++it) {
        const double lr_g = poly_lr(it, total, config.sgd_lr, config.poly_power);
        const double lr_d = poly_lr(it, total, config.adam_lr, config.poly_power);
        const auto s_idx = source_sampler.next(config.source_batch);
        const auto t_idx = target_sampler.next(config.target_batch);

        if (config.strategy == Strategy::source_only) {
            result.trace.seg.push_back(source_step(m, g_params, sgd, source, s_idx, lr_g));
            result.trace.lr.push_back(lr_g);
            if (on_iter) on_iter("adapt", it + 1, m);
            continue;
        }

        const auto s_labels = gather_labels(source, s_idx);
        const auto xs = source.rows_tensor(s_idx);
        const auto xt = target.rows_tensor(t_idx);

        // Class knowledge from the current classifier; constants from here on.
        Tensor fs, ft;
        EncodingBatch es, et;
        {
            FreezeGuard frozen(all_tensors(m));
            fs = feature_extract(m.extractor, xs);
            ft = feature_extract(m.extractor, xt);
            if (config.source_encoding == SourceEncoding::ground_truth && config.strategy != Strategy::binary) {
                es = encode_labels(s_labels, m.num_classes, Domain::source);
            } else {
                es = encode_predictions(classify(m.classifier, fs), Domain::source, knowledge);
            }
            et = encode_predictions(classify(m.classifier, ft), Domain::target, knowledge);
        }

        try {
            // Step 1: discriminator.
            clear_grads(d_params);
            LossValue disc;
            {
                FreezeGuard frozen(g_tensors);
                const auto js = discriminate(m.discriminator, fs);
                const auto jt = discriminate(m.discriminator, ft);
                disc = config.strategy == Strategy::binary ? binary_disc_loss(js, jt) : fg_disc_loss(js, es, jt, et);
                backward(disc.value);
                if (observer) observer(AdaptPhase::discriminator, m);
                adam_step(d_params, adam, lr_d);
                clear_grads(d_params);
            }

            // Step 2: feature extractor and classifier.
            clear_grads(g_params);
            LossValue seg, adv;
            {
                FreezeGuard frozen(d_tensors);
                seg = seg_loss(task_probs(m, xs), s_labels);
                const auto jt = discriminate(m.discriminator, feature_extract(m.extractor, xt));
                adv = config.strategy == Strategy::binary ? binary_adv_loss(jt) : fg_adv_loss(jt, et);
                backward(add(seg.value, scale(adv.value, config.lambda_adv)));
                if (observer) observer(AdaptPhase::generator, m);
                sgd_step(g_params, sgd, lr_g);
                clear_grads(g_params);
            }

            result.trace.seg.push_back(seg.item());
            result.trace.disc.push_back(disc.item());
            result.trace.adv.push_back(adv.item());
            result.trace.lr.push_back(lr_g);
        } catch (const DegenerateBatchError&) {
            // Thrown while building the discriminator loss, before any update.
            clear_grads(d_params);
            ++result.skipped;
            continue;
        }
        if (on_iter) on_iter("adapt", it + 1, m);
    }
    return result;
}

StageResult self_distill(const ModelBundle& teacher, const TrainConfig& config, const Dataset& source,
                         const Dataset& target, std::uint64_t seed, const IterationCallback& on_iter) {
    require_labeled_source(source, teacher.num_classes);
    if (target.empty()) throw DataError("target set is empty");
    const bool class_aware = teacher.domain_groups() == teacher.num_classes;
    StageResult result{ModelBundle::create(teacher.extractor.arch().input_width(), teacher.num_classes,
                                           config.net_config(), derive_seed(seed, "distill.student"), class_aware),
                       {},
                       0};
    auto& student = result.model;
    auto params = student.task_parameters();
    auto state = OptimState::make_sgd(params, sgd_options(config));
    const auto teacher_tensors = all_tensors(teacher);

    BatchSampler source_sampler(source.size(), derive_seed(seed, "distill.source"));
    BatchSampler target_sampler(target.size(), derive_seed(seed, "distill.target"));
    const double temperature = config.temperature;

    const auto total = config.distill_iters;
    for (std::int64_t it = 0; it < total; ++it) {
        const double lr = poly_lr(it, total, config.sgd_lr, config.poly_power);
        const auto s_idx = source_sampler.next(config.source_batch);
        auto t_idx = target_sampler.next(config.target_batch);
        const auto s_labels = gather_labels(source, s_idx);
        const auto xs = source.rows_tensor(s_idx);

        Tensor teacher_s, teacher_t;
        {
            FreezeGuard frozen(teacher_tensors);
            teacher_s = classify(teacher.classifier, feature_extract(teacher.extractor, xs));
            if (config.distill_target_threshold > 0.0) {
                const auto all_t = classify(teacher.classifier, feature_extract(teacher.extractor, target.rows_tensor(t_idx)));
                const auto probs = softmax_t(all_t, 1.0);
                const std::size_t k = probs.cols();
                std::vector<std::size_t> kept;
                for (std::size_t i = 0; i < t_idx.size(); ++i) {
                    auto row = probs.values().subspan(i * k, k);
                    if (*std::max_element(row.begin(), row.end()) >= config.distill_target_threshold) kept.push_back(t_idx[i]);
                }
                t_idx = std::move(kept);
            }
            if (!t_idx.empty()) {
                teacher_t = classify(teacher.classifier, feature_extract(teacher.extractor, target.rows_tensor(t_idx)));
            }
        }

        clear_grads(params);
        const auto zs = classify(student.classifier, feature_extract(student.extractor, xs));
        const auto seg = seg_loss(softmax_t(zs, 1.0), s_labels);
        // Batch mean of the distillation term over every kept source and target row.
        const auto ds = distill_loss(zs, teacher_s, temperature);
        const double ns = static_cast<double>(s_idx.size());
        const double nt = static_cast<double>(t_idx.size());
        Tensor distill_term = scale(ds.value, ns / (ns + nt));
        if (!t_idx.empty()) {
            const auto zt = classify(student.classifier, feature_extract(student.extractor, target.rows_tensor(t_idx)));
            const auto dt = distill_loss(zt, teacher_t, temperature);
            distill_term = add(distill_term, scale(dt.value, nt / (ns + nt)));
        }
        backward(add(seg.value, distill_term));
        sgd_step(params, state, lr);
        clear_grads(params);

        result.trace.seg.push_back(seg.item());
        result.trace.distill.push_back(distill_term.item());
        result.trace.lr.push_back(lr);
        if (on_iter) on_iter("distill", it + 1, student);
    }
    return result;
}

ClassMetrics class_accuracy(std::span<const int> predicted, std::span<const int> labels, std::size_t num_classes) {
    if (labels.empty()) throw DataError("cannot evaluate on an empty dataset");
    if (predicted.size() != labels.size()) throw ShapeError("prediction and label counts differ");
    ClassMetrics metrics;
    metrics.counts.assign(num_classes, 0);
    std::vector<std::size_t> correct(num_classes, 0);
    std::size_t total_correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
            throw DataError("evaluation needs labels in [0, " + std::to_string(num_classes) + ")");
        }
        ++metrics.counts[static_cast<std::size_t>(y)];
        if (predicted[i] == y) {
            ++correct[static_cast<std::size_t>(y)];
            ++total_correct;
        }
    }
    metrics.per_class.assign(num_classes, std::numeric_limits<double>::quiet_NaN());
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t k = 0; k < num_classes; ++k) {
        if (metrics.counts[k] == 0) continue;
        metrics.per_class[k] = static_cast<double>(correct[k]) / static_cast<double>(metrics.counts[k]);
        sum += metrics.per_class[k];
        ++present;
    }
    metrics.mean = sum / static_cast<double>(present);
    metrics.overall = static_cast<double>(total_correct) / static_cast<double>(labels.size());
    return metrics;
}

ClassMetrics evaluate(const ModelBundle& model, const Dataset& data) {
    if (data.empty()) throw DataError("cannot evaluate on an empty dataset");
    FreezeGuard frozen(all_tensors(model));
    const auto predicted = predict(model, data.as_tensor());
    return class_accuracy(predicted, data.labels, model.num_classes);
}

namespace {

nlohmann::json trace_json(const LossTrace& t) {
    return {{"seg", t.seg}, {"disc", t.disc}, {"adv", t.adv}, {"distill", t.distill}, {"lr", t.lr}};
}

nlohmann::json metrics_json(const ClassMetrics& m) {
    return {{"per_class", m.per_class}, {"counts", m.counts}, {"mean", m.mean}, {"overall", m.overall}};
}

} // namespace

std::string report_to_json(const RunReport& r) {
    nlohmann::json doc{
        {"format_version", kReportFormatVersion},
        {"seed", r.seed},
        {"config", nlohmann::json::parse(config_to_json(r.config))},
        {"traces", {{"pretrain", trace_json(r.pretrain)}, {"adapt", trace_json(r.adapt)}, {"distill", trace_json(r.distill)}}},
        {"executed_iterations",
         {{"pretrain", r.pretrain.size()}, {"adapt", r.adapt.size()}, {"distill", r.distill.size()}}},
        {"skipped_iterations", r.skipped_iterations},
        {"source_metrics", metrics_json(r.source_metrics)},
        {"target_metrics", metrics_json(r.target_metrics)},
        {"ccd", {{"per_class", r.ccd.per_class}, {"mean", r.ccd.mean}, {"counts", r.ccd.counts},
                 {"feature_dim", r.ccd.feature_dim}}},
        {"mean_ccd", r.ccd.mean},
        {"wall_clock_seconds", r.wall_clock_seconds},
    };
    if (r.teacher_target_metrics) doc["teacher_target_metrics"] = metrics_json(*r.teacher_target_metrics);
    return doc.dump(1);
}

RunOutput run_from_pretrained(const TrainConfig& config, std::uint64_t seed, const Dataset& source,
                              const Dataset& target, const StageResult& pretrained, const IterationCallback& on_iter) {
    const auto start = std::chrono::steady_clock::now();
    const auto target_view = target.without_labels();

    RunReport report;
    report.seed = seed;
    report.config = config;
    report.pretrain = pretrained.trace;

    auto adapted = adapt(config, pretrained.model.clone(), source, target_view, seed, {}, on_iter);
    report.adapt = std::move(adapted.trace);
    report.skipped_iterations = adapted.skipped;
    ModelBundle model = std::move(adapted.model);

    if (config.distill_iters > 0) {
        report.teacher_target_metrics = evaluate(model, target);
        auto student = self_distill(model, config, source, target_view, seed, on_iter);
        report.distill = std::move(student.trace);
        model = std::move(student.model);
    }

    report.source_metrics = evaluate(model, source);
    report.target_metrics = evaluate(model, target);
    const auto features = extract_features(model, Dataset::concat(source, target), config.dump_cap, seed);
    report.ccd = ccd(features, config.num_classes, config.ccd_scope);
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(model), std::move(report)};
}

RunOutput run_experiment(const TrainConfig& config, std::uint64_t seed, const Dataset& source, const Dataset& target,
                         const IterationCallback& on_iter) {
    config.validate();
    if (source.width() != config.input_dim || target.width() != config.input_dim) {
        throw DataError("dataset width does not match input_dim " + std::to_string(config.input_dim));
    }
    const auto start = std::chrono::steady_clock::now();
    const bool class_aware = config.strategy != Strategy::binary;
    auto model = ModelBundle::create(source.width(), config.num_classes, config.net_config(), seed, class_aware);
    const auto pretrained = pretrain_source(config, source, std::move(model), seed, on_iter);
    auto out = run_from_pretrained(config, seed, source, target, pretrained, on_iter);
    out.report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace fgda
