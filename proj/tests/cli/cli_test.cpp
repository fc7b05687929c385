#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fgda/errors.hpp"
#include "fgda_cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fgda;

namespace {

// Small enough that a full train finishes in well under a second.
const std::vector<std::string> kFast = {"--set", "pretrain_iters=60", "--set", "adapt_iters=20",
                                        "--set", "per_class=40",      "--set", "dump_cap=80"};

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args, bool fast = true) {
    if (fast && args.size() > 1 && args[0] != "gen-data") args.insert(args.end(), kFast.begin(), kFast.end());
    args.insert(args.begin(), "fgda");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("fgda_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

TEST(CliHelpers, SplitValues) {
    EXPECT_EQ(cli::split_values("0.7,0.8"), (std::vector<std::string>{"0.7", "0.8"}));
    EXPECT_EQ(cli::split_values("[1,2],[3]"), (std::vector<std::string>{"[1,2]", "[3]"}));
    EXPECT_EQ(cli::split_values("soft"), (std::vector<std::string>{"soft"}));
    EXPECT_TRUE(cli::split_values("").empty());
}

TEST(CliHelpers, Median) {
    EXPECT_EQ(cli::median({3, 1, 2}), 2.0);
    EXPECT_EQ(cli::median({4, 1, 2, 3}), 2.5);
    EXPECT_TRUE(std::isnan(cli::median({})));
}

TEST(CliHelpers, ResolveConfigLayers) {
    const auto c = cli::resolve_config(std::nullopt, {"lambda_adv=0.01", "strategy=hard", "translation=[1,2]"}, "binary");
    EXPECT_EQ(c.lambda_adv, 0.01);
    EXPECT_EQ(c.strategy, Strategy::binary);
    EXPECT_EQ(c.translation, (std::vector<double>{1, 2}));
    EXPECT_THROW(cli::resolve_config(std::nullopt, {"clip"}), ValidationError);
    EXPECT_THROW(cli::resolve_config(std::nullopt, {"clpi=0.5"}), ValidationError);
    EXPECT_THROW(cli::resolve_config(std::nullopt, {"clip=2"}), ValidationError);
}

TEST_F(CliTest, UsageErrorsExitOne) {
    EXPECT_EQ(run({}, false).code, cli::kValidationError);
    EXPECT_EQ(run({"frobnicate"}, false).code, cli::kValidationError);
    EXPECT_EQ(run({"train", "--out", path("a"), "--set", "lamda_adv=0.1"}).code, cli::kValidationError);
    EXPECT_EQ(run({"train", "--out", path("a"), "--set", "clip=0"}).code, cli::kValidationError);
    EXPECT_EQ(run({"train", "--out", path("a"), "--strategy", "fancy"}).code, cli::kValidationError);
    const auto r = run({"sweep", "--out", path("s"), "--param", "no_such_key", "--values", "1,2"});
    EXPECT_EQ(r.code, cli::kValidationError);
    EXPECT_NE(r.err.find("no_such_key"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("s")));
}

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(run({"--help"}, false).code, cli::kOk); }

TEST_F(CliTest, RuntimeErrorsExitTwo) {
    ASSERT_EQ(run({"gen-data", "--out", path("data"), "--set", "per_class=20"}, false).code, cli::kOk);
    const auto r = run({"eval", "--out", path("e"), "--data", path("data"), "--model", path("missing.json")});
    EXPECT_EQ(r.code, cli::kRuntimeError);
    EXPECT_NE(r.err.find("missing.json"), std::string::npos);
}

TEST_F(CliTest, TrainWritesConfigReportAndModel) {
    const auto r = run({"train", "--out", path("t"), "--strategy", "soft"});
    ASSERT_EQ(r.code, cli::kOk) << r.err;
    for (const char* f : {"config.json", "report.json", "model.json"}) EXPECT_TRUE(fs::exists(dir_ / "t" / f)) << f;
    const auto report = read_json(dir_ / "t" / "report.json");
    EXPECT_EQ(report["config"]["lambda_adv"], 0.001);
    EXPECT_EQ(report["config"]["temperature"], 1.8);
    EXPECT_EQ(report["config"]["clip"], 0.9);
    EXPECT_EQ(report["config"]["strategy"], "soft");
    EXPECT_EQ(read_json(dir_ / "t" / "config.json"), report["config"]);
}

TEST_F(CliTest, PipelineIsDeterministic) {
    auto pipeline = [&](const std::string& tag) {
        const auto d = path(tag + "_data"), t = path(tag + "_train"), c = path(tag + "_ccd");
        EXPECT_EQ(run({"gen-data", "--out", d, "--seed", "3", "--set", "per_class=40"}, false).code, 0);
        EXPECT_EQ(run({"train", "--out", t, "--data", d, "--seed", "3"}).code, 0);
        EXPECT_EQ(run({"ccd", "--out", c, "--data", d, "--model", t + "/model.json", "--seed", "3"}).code, 0);
        auto report = read_json(fs::path(t) / "report.json");
        report.erase("wall_clock_seconds");
        return std::make_tuple(read_file(fs::path(d) / "source.csv") + read_file(fs::path(d) / "target.csv"),
                               report.dump(), read_file(fs::path(t) / "model.json"), read_file(fs::path(c) / "ccd.json"));
    };
    EXPECT_EQ(pipeline("a"), pipeline("b"));
}

TEST_F(CliTest, EvalDumpAndCcdFromFeatures) {
    ASSERT_EQ(run({"gen-data", "--out", path("data"), "--set", "per_class=40"}, false).code, 0);
    ASSERT_EQ(run({"train", "--out", path("t"), "--data", path("data")}).code, 0);
    const auto model = path("t") + "/model.json";
    ASSERT_EQ(run({"eval", "--out", path("e"), "--data", path("data"), "--model", model}).code, 0);
    const auto ev = read_json(dir_ / "e" / "eval.json");
    EXPECT_EQ(ev["target_metrics"]["per_class"].size(), 4u);
    EXPECT_TRUE(fs::exists(dir_ / "e" / "config.json"));

    ASSERT_EQ(run({"dump-features", "--out", path("f"), "--data", path("data"), "--model", model}).code, 0);
    ASSERT_EQ(run({"ccd", "--out", path("c1"), "--features", path("f") + "/features.csv"}).code, 0);
    ASSERT_EQ(run({"ccd", "--out", path("c2"), "--data", path("data"), "--model", model}).code, 0);
    EXPECT_NEAR(read_json(dir_ / "c1" / "ccd.json")["mean"].get<double>(),
                read_json(dir_ / "c2" / "ccd.json")["mean"].get<double>(), 1e-12);
}

TEST_F(CliTest, CheckpointsAndLogging) {
    const auto r = run({"train", "--out", path("t"), "--set", "checkpoint_every=10", "--set", "log_every=10"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir_ / "t" / "checkpoints" / "pretrain_60.json"));
    EXPECT_TRUE(fs::exists(dir_ / "t" / "checkpoints" / "adapt_20.json"));
    EXPECT_NE(r.err.find("adapt 10"), std::string::npos);
}

TEST_F(CliTest, SweepLayoutAndMedians) {
    const auto r = run({"sweep", "--out", path("s"), "--strategy", "soft", "--param", "clip", "--values", "0.7,0.8,0.9,1.0",
                        "--set", "seeds=[0,1,2]"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* v : {"0.7", "0.8", "0.9", "1.0"}) {
        for (int seed = 0; seed < 3; ++seed) {
            const auto run_dir = dir_ / "s" / (std::string("clip=") + v) / ("seed_" + std::to_string(seed));
            EXPECT_TRUE(fs::exists(run_dir / "report.json")) << run_dir;
            EXPECT_TRUE(fs::exists(run_dir / "config.json")) << run_dir;
        }
    }
    std::ifstream in(dir_ / "s" / "summary.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "value,seed,target_mean_accuracy,mean_ccd,status");
    int medians = 0;
    while (std::getline(in, line)) {
        const auto cells = split_csv_line(line);
        ASSERT_EQ(cells.size(), 5u) << line;
        EXPECT_EQ(cells[4], "ok");
        const auto value_dir = dir_ / "s" / ("clip=" + cells[0]);
        if (cells[1] == "median") {
            ++medians;
            std::vector<double> accs, ccds;
            for (int seed = 0; seed < 3; ++seed) {
                const auto rep = read_json(value_dir / ("seed_" + std::to_string(seed)) / "report.json");
                accs.push_back(rep["target_metrics"]["mean"]);
                ccds.push_back(rep["mean_ccd"]);
            }
            EXPECT_EQ(std::stod(cells[2]), cli::median(accs));
            EXPECT_EQ(std::stod(cells[3]), cli::median(ccds));
        } else {
            const auto rep = read_json(value_dir / ("seed_" + cells[1]) / "report.json");
            EXPECT_EQ(std::stod(cells[2]), rep["target_metrics"]["mean"].get<double>());
            EXPECT_EQ(rep["config"]["clip"].get<double>(), std::stod(cells[0]));
        }
    }
    EXPECT_EQ(medians, 4);
}

TEST_F(CliTest, SingleValueSweepMatchesTrain) {
    ASSERT_EQ(run({"sweep", "--out", path("s"), "--param", "lambda_adv", "--values", "0.001", "--seed", "2"}).code, 0);
    ASSERT_EQ(run({"train", "--out", path("t"), "--seed", "2"}).code, 0);
    auto a = read_json(dir_ / "s" / "lambda_adv=0.001" / "seed_2" / "report.json");
    auto b = read_json(dir_ / "t" / "report.json");
    a.erase("wall_clock_seconds");
    b.erase("wall_clock_seconds");
    EXPECT_EQ(a, b);
    std::ifstream in(dir_ / "s" / "summary.csv");
    std::string header, row, med;
    std::getline(in, header);
    std::getline(in, row);
    std::getline(in, med);
    EXPECT_EQ(std::stod(split_csv_line(med)[2]), b["target_metrics"]["mean"].get<double>());
    EXPECT_EQ(std::stod(split_csv_line(row)[3]), b["mean_ccd"].get<double>());
}

TEST_F(CliTest, SweepRecordsFailedRunsAndContinues) {
    // labels beyond num_classes only surface once the data is read
    ASSERT_EQ(run({"gen-data", "--out", path("data"), "--set", "per_class=20"}, false).code, 0);
    const auto r = run({"sweep", "--out", path("s"), "--data", path("data"), "--param", "num_classes", "--values", "3,4"});
    EXPECT_EQ(r.code, cli::kRuntimeError);
    const auto summary = read_file(dir_ / "s" / "summary.csv");
    EXPECT_NE(summary.find("error:"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "s" / "num_classes=4" / "seed_0" / "report.json"));
}
