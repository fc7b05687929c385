#include "fgda_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fgda/analysis.hpp"
#include "fgda/checkpoint.hpp"
#include "fgda/csv.hpp"
#include "fgda/datagen.hpp"
#include "fgda/errors.hpp"
#include "fgda/trainer.hpp"

namespace fgda::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

json parse_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return text;
    }
}

json metrics_json(const ClassMetrics& m) {
    return {{"per_class", m.per_class}, {"counts", m.counts}, {"mean", m.mean}, {"overall", m.overall}};
}

struct Options {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::vector<std::string> sets;
    std::string strategy;
    std::string data;
    std::string model;
    std::string features;
    std::string param;
    std::string values;
};

struct Resolved {
    TrainConfig config;
    std::uint64_t seed = 0;
    fs::path out;
};

Resolved resolve(const Options& o) {
    Resolved r;
    r.config = resolve_config(o.config.empty() ? std::nullopt : std::optional<fs::path>(o.config), o.sets, o.strategy);
    if (o.has_seed) r.config.seeds = {o.seed};
    r.seed = r.config.seeds.front();
    r.out = o.out;
    fs::create_directories(r.out);
    return r;
}

void write_config(const fs::path& dir, const TrainConfig& config) { write_text(dir / "config.json", config_to_json(config)); }

std::pair<Dataset, Dataset> load_or_generate(const Options& o, const TrainConfig& config, std::uint64_t seed) {
    if (o.data.empty()) return gen_gaussian_domains(config.data_spec(seed));
    const fs::path dir = o.data;
    auto source = load_csv_dataset(dir / "source.csv", config.num_classes);
    auto target = load_csv_dataset(dir / "target.csv", config.num_classes);
    if (source.width() != config.input_dim || target.width() != config.input_dim) {
        throw ValidationError("data width does not match input_dim " + std::to_string(config.input_dim));
    }
    return {std::move(source), std::move(target)};
}

IterationCallback progress(const TrainConfig& config, const fs::path& out, std::ostream& err) {
    if (config.log_every <= 0 && config.checkpoint_every <= 0) return {};
    return [&config, out, &err](const std::string& stage, std::int64_t iter, const ModelBundle& model) {
        if (config.log_every > 0 && iter % config.log_every == 0) err << stage << " " << iter << "\n";
        if (config.checkpoint_every > 0 && iter % config.checkpoint_every == 0) {
            fs::create_directories(out / "checkpoints");
            save_checkpoint(model, out / "checkpoints" / (stage + "_" + std::to_string(iter) + ".json"));
        }
    };
}

int cmd_gen_data(const Options& o, std::ostream& out) {
    const auto r = resolve(o);
    auto [source, target] = gen_gaussian_domains(r.config.data_spec(r.seed));
    save_csv_dataset(source, r.out / "source.csv");
    save_csv_dataset(target, r.out / "target.csv");
    write_config(r.out, r.config);
    out << "wrote " << source.size() << " source and " << target.size() << " target samples to " << r.out.string()
        << "\n";
    return kOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
    const auto r = resolve(o);
    auto [source, target] = load_or_generate(o, r.config, r.seed);
    write_config(r.out, r.config);
    auto run = run_experiment(r.config, r.seed, source, target, progress(r.config, r.out, err));
    save_checkpoint(run.model, r.out / "model.json");
    write_text(r.out / "report.json", report_to_json(run.report));
    out << to_string(r.config.strategy) << " seed " << r.seed << ": target acc " << fmt_double(run.report.target_metrics.mean)
        << ", mean ccd " << fmt_double(run.report.ccd.mean) << "\n";
    return kOk;
}

ModelBundle require_model(const Options& o) {
    if (o.model.empty()) throw ValidationError("--model is required");
    return load_checkpoint(o.model);
}

int cmd_eval(const Options& o, std::ostream& out) {
    const auto r = resolve(o);
    if (o.data.empty()) throw ValidationError("--data is required");
    const auto model = require_model(o);
    auto config = r.config;
    config.num_classes = model.num_classes;
    auto [source, target] = load_or_generate(o, config, r.seed);
    const auto src = evaluate(model, source);
    const auto tgt = evaluate(model, target);
    write_config(r.out, config);
    write_text(r.out / "eval.json", json{{"source_metrics", metrics_json(src)}, {"target_metrics", metrics_json(tgt)}}.dump(1));
    out << "source acc " << fmt_double(src.mean) << ", target acc " << fmt_double(tgt.mean) << "\n";
    return kOk;
}

int cmd_dump_features(const Options& o, std::ostream& out) {
    const auto r = resolve(o);
    if (o.data.empty()) throw ValidationError("--data is required");
    const auto model = require_model(o);
    auto config = r.config;
    config.num_classes = model.num_classes;
    auto [source, target] = load_or_generate(o, config, r.seed);
    write_config(r.out, config);
    const auto dumped =
        dump_features(model, Dataset::concat(source, target), r.out / "features.csv", config.dump_cap, r.seed);
    out << "wrote " << dumped.size() << " feature rows to " << (r.out / "features.csv").string() << "\n";
    return kOk;
}

int cmd_ccd(const Options& o, std::ostream& out) {
    const auto r = resolve(o);
    auto config = r.config;
    Dataset features;
    if (!o.features.empty()) {
        features = load_csv_dataset(o.features, config.num_classes);
    } else {
        if (o.data.empty()) throw ValidationError("ccd needs --features or --model with --data");
        const auto model = require_model(o);
        config.num_classes = model.num_classes;
        auto [source, target] = load_or_generate(o, config, r.seed);
        features = extract_features(model, Dataset::concat(source, target), config.dump_cap, r.seed);
    }
    const auto report = ccd(features, config.num_classes, config.ccd_scope);
    write_config(r.out, config);
    write_text(r.out / "ccd.json", json{{"per_class", report.per_class},
                                        {"mean", report.mean},
                                        {"counts", report.counts},
                                        {"feature_dim", report.feature_dim}}
                                       .dump(1));
    out << "mean ccd " << fmt_double(report.mean) << "\n";
    return kOk;
}

std::string dir_name(const std::string& param, const std::string& value) {
    std::string name = param + "=";
    for (char c : value) name += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') ? c : '_';
    return name;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    const auto keys = config_keys();
    if (std::find(keys.begin(), keys.end(), o.param) == keys.end()) {
        throw ValidationError("unknown sweep parameter '" + o.param + "'");
    }
    const auto values = split_values(o.values);
    if (values.empty()) throw ValidationError("--values must not be empty");

    // Every configuration is validated before anything runs.
    std::vector<TrainConfig> configs;
    for (const auto& v : values) {
        auto sets = o.sets;
        sets.push_back(o.param + "=" + v);
        auto c = resolve_config(o.config.empty() ? std::nullopt : std::optional<fs::path>(o.config), sets, o.strategy);
        if (o.has_seed) c.seeds = {o.seed};
        configs.push_back(std::move(c));
    }
    const fs::path root = o.out;
    fs::create_directories(root);

    std::ostringstream csv;
    csv << "value,seed,target_mean_accuracy,mean_ccd,status\n";
    int worst = kOk;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        std::vector<double> accs;
        std::vector<double> ccds;
        for (auto seed : configs[vi].seeds) {
            auto config = configs[vi];
            config.seeds = {seed};
            const fs::path dir = root / dir_name(o.param, values[vi]) / ("seed_" + std::to_string(seed));
            std::string status = "ok";
            double acc = std::numeric_limits<double>::quiet_NaN();
            double mccd = acc;
            try {
                fs::create_directories(dir);
                write_config(dir, config);
                auto [source, target] = load_or_generate(o, config, seed);
                auto run = run_experiment(config, seed, source, target, progress(config, dir, err));
                save_checkpoint(run.model, dir / "model.json");
                write_text(dir / "report.json", report_to_json(run.report));
                acc = run.report.target_metrics.mean;
                mccd = run.report.ccd.mean;
                accs.push_back(acc);
                ccds.push_back(mccd);
            } catch (const std::exception& e) {
                status = std::string("error: ") + e.what();
                std::replace(status.begin(), status.end(), ',', ';');
                std::replace(status.begin(), status.end(), '\n', ' ');
                worst = kRuntimeError;
                err << o.param << "=" << values[vi] << " seed " << seed << " failed: " << e.what() << "\n";
            }
            csv << '"' << values[vi] << '"' << "," << seed << "," << fmt_double(acc) << "," << fmt_double(mccd) << ","
                << status << "\n";
        }
        const double macc = median(accs);
        const double mccd = median(ccds);
        csv << '"' << values[vi] << '"' << ",median," << fmt_double(macc) << "," << fmt_double(mccd) << ","
            << (accs.empty() ? "error" : "ok") << "\n";
        out << o.param << "=" << values[vi] << ": median target acc " << fmt_double(macc) << ", median ccd "
            << fmt_double(mccd) << "\n";
    }
    write_text(root / "summary.csv", csv.str());
    return worst;
}

} // namespace

TrainConfig resolve_config(const std::optional<fs::path>& config_path, const std::vector<std::string>& overrides,
                           const std::string& strategy) {
    json doc = json::object();
    if (config_path) {
        try {
            doc = json::parse(read_text(*config_path));
        } catch (const json::parse_error& e) {
            throw ValidationError("config " + config_path->string() + " is not valid JSON: " + e.what());
        }
        if (!doc.is_object()) throw ValidationError("config must be a JSON object");
    }
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw ValidationError("override '" + kv + "' is not key=value");
        doc[kv.substr(0, eq)] = parse_value(kv.substr(eq + 1));
    }
    if (!strategy.empty()) doc["strategy"] = strategy;
    return config_from_json(doc.dump());
}

std::vector<std::string> split_values(const std::string& list) {
    std::vector<std::string> parts;
    std::string cur;
    int depth = 0;
    for (char c : list) {
        if (c == '[' || c == '{') ++depth;
        if (c == ']' || c == '}') --depth;
        if (c == ',' && depth == 0) {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
            continue;
        }
        cur += c;
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fine-grained adversarial domain adaptation on synthetic domains", "fgda"};
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "TrainConfig JSON file");
        sub->add_option("--out", o.out, "output directory (created if absent)");
        sub->add_option("--seed", o.seed, "seed override");
        sub->add_option("--set", o.sets, "key=value override, repeatable")->allow_extra_args(false);
        sub->add_option("--strategy", o.strategy, "source_only, binary, hard or soft");
    };
    auto* gen = app.add_subcommand("gen-data", "generate source.csv and target.csv");
    auto* train = app.add_subcommand("train", "pretrain, adapt and evaluate one run");
    auto* eval = app.add_subcommand("eval", "per-class accuracy of a checkpoint");
    auto* ccd_cmd = app.add_subcommand("ccd", "class center distance of extracted features");
    auto* dump = app.add_subcommand("dump-features", "write extractor features as CSV");
    auto* sweep = app.add_subcommand("sweep", "one run per value and seed");
    for (auto* sub : {gen, train, eval, ccd_cmd, dump, sweep}) common(sub);
    for (auto* sub : {train, eval, ccd_cmd, dump, sweep}) sub->add_option("--data", o.data, "directory with source.csv and target.csv");
    for (auto* sub : {eval, ccd_cmd, dump}) sub->add_option("--model", o.model, "checkpoint JSON");
    ccd_cmd->add_option("--features", o.features, "feature dump CSV");
    sweep->add_option("--param", o.param, "config key to vary")->required();
    sweep->add_option("--values", o.values, "comma-separated values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    }
    for (const auto* sub : {gen, train, eval, ccd_cmd, dump, sweep}) {
        if (sub->count("--seed") > 0) o.has_seed = true;
    }

    try {
        if (*gen) return cmd_gen_data(o, out);
        if (*train) return cmd_train(o, out, err);
        if (*eval) return cmd_eval(o, out);
        if (*ccd_cmd) return cmd_ccd(o, out);
        if (*dump) return cmd_dump_features(o, out);
        if (*sweep) return cmd_sweep(o, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kValidationError;
}

} // namespace fgda::cli
