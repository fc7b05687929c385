#include <gtest/gtest.h>

#include <json.hpp>

#include "fgda/config.hpp"
#include "fgda/errors.hpp"

using namespace fgda;

TEST(Config, DefaultsValidate) {
    TrainConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.lambda_adv, 0.001);
    EXPECT_EQ(c.temperature, 1.8);
    EXPECT_EQ(c.clip, 0.9);
    EXPECT_EQ(c.hard_threshold, 0.9);
    EXPECT_EQ(c.sgd_lr, 2.5e-4);
    EXPECT_EQ(c.adam_lr, 1e-4);
    EXPECT_EQ(c.adam_beta2, 0.99);
    EXPECT_EQ(c.pretrain_iters, 2000);
    EXPECT_EQ(c.adapt_iters, 4000);
    EXPECT_EQ(c.batch_size, 64u);
}

TEST(Config, JsonRoundTrip) {
    TrainConfig c;
    c.strategy = Strategy::hard;
    c.translation = {1.0, -2.0};
    c.seeds = {7, 8};
    c.source_encoding = SourceEncoding::ground_truth;
    c.ccd_scope = CcdScope::target;
    const auto text = config_to_json(c);
    const auto back = config_from_json(text);
    EXPECT_EQ(config_to_json(back), text);
    EXPECT_EQ(back.strategy, Strategy::hard);
    EXPECT_EQ(back.seeds, (std::vector<std::uint64_t>{7, 8}));
}

TEST(Config, EveryFieldIsSerialized) {
    const auto doc = nlohmann::json::parse(config_to_json(TrainConfig{}));
    const auto keys = config_keys();
    EXPECT_EQ(doc.size(), keys.size());
    for (const auto& k : keys) EXPECT_TRUE(doc.contains(k)) << k;
}

TEST(Config, MissingKeysFallBackToDefaults) {
    const auto c = config_from_json(R"({"lambda_adv": 0.01})");
    EXPECT_EQ(c.lambda_adv, 0.01);
    EXPECT_EQ(c.temperature, 1.8);
}

TEST(Config, UnknownKeysAreListed) {
    try {
        config_from_json(R"({"lamda_adv": 0.01, "tempreature": 2})");
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("lamda_adv"), std::string::npos);
        EXPECT_NE(msg.find("tempreature"), std::string::npos);
    }
}

TEST(Config, TypeMismatchAndBadJson) {
    EXPECT_THROW(config_from_json(R"({"lambda_adv": "high"})"), ValidationError);
    EXPECT_THROW(config_from_json("{"), ValidationError);
    EXPECT_THROW(config_from_json("[1, 2]"), ValidationError);
    EXPECT_THROW(config_from_json(R"({"strategy": "fancy"})"), ValidationError);
}

TEST(Config, ValidationCollectsEveryProblem) {
    TrainConfig c;
    c.clip = 0.0;
    c.temperature = -1.0;
    c.source_batch = 10;
    try {
        c.validate();
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("clip"), std::string::npos);
        EXPECT_NE(msg.find("temperature"), std::string::npos);
        EXPECT_NE(msg.find("batch"), std::string::npos);
    }
}

TEST(Config, StrategyNames) {
    for (auto s : {Strategy::source_only, Strategy::binary, Strategy::hard, Strategy::soft})
        EXPECT_EQ(strategy_from_string(to_string(s)), s);
    EXPECT_THROW(strategy_from_string("Soft"), ValidationError);
}

TEST(Config, DerivedViews) {
    TrainConfig c;
    c.rotation_deg = 90.0;
    const auto spec = c.data_spec(3);
    EXPECT_NEAR(spec.shift.rotation, 1.5707963267948966, 1e-15);
    EXPECT_EQ(spec.seed, 3u);
    c.strategy = Strategy::hard;
    EXPECT_EQ(c.knowledge_options().kind, KnowledgeKind::hard);
    c.strategy = Strategy::binary;
    EXPECT_EQ(c.knowledge_options().kind, KnowledgeKind::binary);
    EXPECT_EQ(c.net_config().feature_width, 16u);
}
