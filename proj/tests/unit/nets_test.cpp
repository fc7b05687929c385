#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fgda/checkpoint.hpp"
#include "fgda/errors.hpp"
#include "fgda/nets.hpp"
#include "fgda/ops.hpp"
#include "oracles.hpp"

using namespace fgda;
using fgda::testing::gradcheck;

namespace {

Tensor random_input(std::uint64_t seed, std::size_t n, std::size_t m) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> v(n * m);
    for (auto& x : v) x = d(rng);
    return Tensor::from({n, m}, v);
}

std::vector<Tensor> all_tensors(const Mlp& net) { return net.tensors(); }

} // namespace

TEST(InitParams, DeterministicPerSeed) {
    MlpArch arch{{3, 5, 2}, 0.2, Terminal::none};
    const auto a = init_params(arch, 11);
    const auto b = init_params(arch, 11);
    const auto c = init_params(arch, 12);
    ASSERT_EQ(a.size(), 2u);
    bool differs = false;
    for (std::size_t l = 0; l < a.size(); ++l) {
        for (std::size_t i = 0; i < a[l].weight.size(); ++i) {
            EXPECT_EQ(a[l].weight.values()[i], b[l].weight.values()[i]);
            differs = differs || a[l].weight.values()[i] != c[l].weight.values()[i];
        }
    }
    EXPECT_TRUE(differs);
}

TEST(InitParams, ZeroBiases) {
    for (const auto& layer : init_params({{4, 8, 8, 3}, 0.2, Terminal::none}, 5))
        for (double b : layer.bias.values()) EXPECT_EQ(b, 0.0);
}

TEST(InitParams, UniformBoundFromFanIn) {
    const auto layers = init_params({{4, 8}, 0.2, Terminal::none}, 9);
    double largest = 0.0;
    for (double w : layers[0].weight.values()) largest = std::max(largest, std::abs(w));
    EXPECT_LE(largest, 0.5);
    EXPECT_GT(largest, 0.3);  // 32 draws from U(-0.5, 0.5) essentially never all stay this small
}

TEST(MlpArch, RejectsBadArchitectures) {
    EXPECT_THROW(Mlp(MlpArch{{4}, 0.2, Terminal::none}, 0), ShapeError);
    EXPECT_THROW(Mlp(MlpArch{{4, 0, 2}, 0.2, Terminal::none}, 0), ShapeError);
    EXPECT_THROW(Mlp(MlpArch{{4, 2}, 1.0, Terminal::none}, 0), ParameterError);
}

TEST(FeatureExtract, ZeroNetworkGivesZeroFeatures) {
    const auto f = Mlp::zeros({{3, 6, 4}, 0.2, Terminal::none});
    const auto out = feature_extract(f, random_input(1, 5, 3));
    for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(FeatureExtract, IdentityLayerPassesInputThrough) {
    DenseLayer layer{Tensor::from({2, 2}, {1, 0, 0, 1}, true), Tensor::zeros({2}, true)};
    Mlp f({{2, 2}, 0.2, Terminal::none}, {layer});
    const auto x = Tensor::from({2, 2}, {0.5, -1.5, 3.0, -0.25});
    const auto out = feature_extract(f, x);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(out.values()[i], x.values()[i]);
}

TEST(FeatureExtract, WrongInputWidthThrows) {
    Mlp f({{3, 4}, 0.2, Terminal::none}, 0);
    EXPECT_THROW(feature_extract(f, Tensor::zeros({2, 2})), ShapeError);
}

TEST(FeatureExtract, Gradcheck) {
    Mlp f({{2, 4, 3}, 0.2, Terminal::none}, 21);
    const auto x = random_input(2, 6, 2);
    const auto w = random_input(3, 6, 3);
    const auto res = gradcheck([&] { return sum(mul(feature_extract(f, x), w)); }, all_tensors(f));
    EXPECT_LT(res.max_rel_error, 1e-5);
    EXPECT_EQ(res.checked, 2u * 4 + 4 + 4u * 3 + 3);
}

TEST(Classify, ZeroNetworkIsUniform) {
    const auto c = Mlp::zeros({{4, 3}, 0.2, Terminal::none});
    const auto p = softmax_t(classify(c, random_input(4, 2, 4)), 1.0);
    for (double v : p.values()) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

TEST(Classify, HandSetLogits) {
    DenseLayer layer{Tensor::from({2, 2}, {2, 0, 0, 0}, true), Tensor::zeros({2}, true)};
    Mlp c({{2, 2}, 0.2, Terminal::none}, {layer});
    const auto p = softmax_t(classify(c, Tensor::from({1, 2}, {1, 0})), 1.0);
    EXPECT_NEAR(p.values()[0], 0.8808, 5e-5);
    EXPECT_NEAR(p.values()[1], 0.1192, 5e-5);
}

TEST(Classify, GradcheckThroughExtractor) {
    auto model = ModelBundle::create(2, 3, NetConfig{{5}, 4, {6}, 0.2}, 8);
    const auto x = random_input(5, 7, 2);
    const std::vector<int> y = {0, 1, 2, 2, 1, 0, 1};
    auto tensors = model.extractor.tensors();
    for (auto& t : model.classifier.tensors()) tensors.push_back(t);
    const auto res = gradcheck(
        [&] {
            const auto p = softmax_t(classify(model.classifier, feature_extract(model.extractor, x)), 1.0);
            std::vector<double> onehot(7 * 3, 0.0);
            for (std::size_t i = 0; i < 7; ++i) onehot[i * 3 + static_cast<std::size_t>(y[i])] = 1.0;
            return sum(mul(log_clamped(p), Tensor::from({7, 3}, onehot)));
        },
        tensors);
    EXPECT_LT(res.max_rel_error, 1e-5);
}

TEST(Discriminate, ZeroNetworkIsUniform) {
    const auto d = Mlp::zeros({{4, 6, 4}, 0.2, Terminal::softmax});
    const auto joint = discriminate(d, random_input(6, 3, 4));
    for (double v : joint.values()) EXPECT_NEAR(v, 0.25, 1e-15);
    const auto marginal = domain_marginal(joint);
    EXPECT_EQ(marginal.shape(), (Shape{3, 2}));
    for (double v : marginal.values()) EXPECT_NEAR(v, 0.5, 1e-15);
}

TEST(Discriminate, MarginalSumsBlocks) {
    const auto joint = Tensor::from({1, 6}, {0.1, 0.2, 0.05, 0.3, 0.15, 0.2});
    const auto m = domain_marginal(joint);
    EXPECT_NEAR(m.values()[0], 0.35, 1e-15);
    EXPECT_NEAR(m.values()[1], 0.65, 1e-15);
}

TEST(Discriminate, RequiresSoftmaxTerminal) {
    const auto d = Mlp::zeros({{4, 4}, 0.2, Terminal::none});
    EXPECT_THROW(discriminate(d, Tensor::zeros({1, 4})), ShapeError);
    EXPECT_THROW(domain_marginal(Tensor::zeros({1, 3})), ShapeError);
}

TEST(Discriminate, Gradcheck) {
    Mlp d({{3, 5, 4}, 0.2, Terminal::softmax}, 13);
    const auto f = random_input(7, 5, 3);
    const auto w = random_input(8, 5, 4);
    const auto res = gradcheck([&] { return sum(mul(log_clamped(discriminate(d, f)), w)); }, d.tensors());
    EXPECT_LT(res.max_rel_error, 1e-5);
}

TEST(ModelBundle, CreateIsDeterministicAndValid) {
    const auto a = ModelBundle::create(2, 4, NetConfig{}, 3);
    const auto b = ModelBundle::create(2, 4, NetConfig{}, 3);
    EXPECT_NO_THROW(a.validate());
    EXPECT_EQ(a.domain_groups(), 4u);
    EXPECT_EQ(checkpoint_to_string(a), checkpoint_to_string(b));
    const auto binary = ModelBundle::create(2, 4, NetConfig{}, 3, false);
    EXPECT_EQ(binary.domain_groups(), 1u);
    EXPECT_NO_THROW(binary.validate());
}

TEST(ModelBundle, ParameterNamesAndGroups) {
    const auto m = ModelBundle::create(2, 3, NetConfig{{8}, 4, {8}, 0.2}, 0);
    const auto task = m.task_parameters();
    const auto disc = m.discriminator_parameters();
    ASSERT_EQ(task.size(), 6u);
    ASSERT_EQ(disc.size(), 4u);
    EXPECT_EQ(task.front().name, "F.0.weight");
    EXPECT_EQ(task.back().name, "C.0.bias");
    EXPECT_EQ(disc.front().name, "D.0.weight");
}

TEST(ModelBundle, CloneIsDeep) {
    const auto m = ModelBundle::create(2, 2, NetConfig{{4}, 3, {4}, 0.2}, 1);
    auto c = m.clone();
    c.extractor.layers()[0].weight.mutable_values()[0] += 1.0;
    EXPECT_NE(c.extractor.layers()[0].weight.values()[0], m.extractor.layers()[0].weight.values()[0]);
}

TEST(Predict, SmallestIndexWinsTies) {
    auto m = ModelBundle::create(2, 3, NetConfig{{4}, 3, {4}, 0.2}, 1);
    for (auto& layer : m.classifier.layers()) {
        for (auto& v : layer.weight.mutable_values()) v = 0.0;
        for (auto& v : layer.bias.mutable_values()) v = 0.0;
    }
    m.classifier.layers()[0].bias.mutable_values()[1] = 1.0;
    m.classifier.layers()[0].bias.mutable_values()[2] = 1.0;
    for (int p : predict(m, random_input(1, 4, 2))) EXPECT_EQ(p, 1);
}

TEST(Checkpoint, RoundTripIsExact) {
    const auto m = ModelBundle::create(2, 4, NetConfig{}, 42);
    const auto text = checkpoint_to_string(m);
    const auto back = checkpoint_from_string(text);
    EXPECT_EQ(back.num_classes, 4u);
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(checkpoint_to_string(back), text);
    const auto x = random_input(9, 5, 2);
    const auto a = classify(m.classifier, feature_extract(m.extractor, x));
    const auto b = classify(back.classifier, feature_extract(back.extractor, x));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.values()[i], b.values()[i]);
}

TEST(Checkpoint, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "fgda_ckpt_test.json";
    const auto m = ModelBundle::create(3, 2, NetConfig{{4}, 2, {4}, 0.1}, 7, false);
    save_checkpoint(m, path);
    EXPECT_EQ(checkpoint_to_string(load_checkpoint(path)), checkpoint_to_string(m));
    std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsMalformedInput) {
    EXPECT_THROW(checkpoint_from_string("not json"), ParseError);
    EXPECT_THROW(checkpoint_from_string("{}"), ParseError);
    auto doc = checkpoint_to_string(ModelBundle::create(2, 2, NetConfig{{4}, 2, {4}, 0.2}, 0));
    doc.replace(doc.find("\"format_version\": 1"), 19, "\"format_version\": 9");
    EXPECT_THROW(checkpoint_from_string(doc), ParseError);
    EXPECT_THROW(load_checkpoint("/nonexistent/dir/model.json"), IoError);
}
