#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <cmath>
#include <filesystem>
#include <random>

#include "fgda/analysis.hpp"
#include "fgda/csv.hpp"
#include "fgda/datagen.hpp"
#include "fgda/errors.hpp"
#include "oracles.hpp"

using namespace fgda;
namespace ft = fgda::testing;

namespace {

Matrix from_rows(const ft::Mat& rows) {
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    return m;
}

} // namespace

TEST(ClassCenters, SingletonsAreThePoints) {
    const auto x = from_rows({{1, 2}, {-3, 4}, {0.5, 0.25}});
    const std::vector<int> y = {2, 0, 1};
    const auto c = class_centers(x, y, 3);
    EXPECT_EQ(c.centers(0, 0), -3.0);
    EXPECT_EQ(c.centers(2, 1), 2.0);
    EXPECT_EQ(c.centers(1, 0), 0.5);
    EXPECT_EQ(c.present_count(), 3u);
}

TEST(ClassCenters, HandMean) {
    const auto x = from_rows({{0, 0}, {0, 0.2}});
    const std::vector<int> y = {0, 0};
    const auto c = class_centers(x, y, 2);
    EXPECT_NEAR(c.centers(0, 1), 0.1, 1e-15);
    EXPECT_FALSE(c.present[1]);
}

TEST(ClassCenters, PermutationInvariant) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    ft::Mat rows(30, ft::Vec(3));
    std::vector<int> y(30);
    for (std::size_t i = 0; i < 30; ++i) {
        for (auto& v : rows[i]) v = n(rng);
        y[i] = static_cast<int>(i % 3);
    }
    const auto a = class_centers(from_rows(rows), y, 3);
    std::vector<std::size_t> order(30);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    ft::Mat rows2;
    std::vector<int> y2;
    for (auto i : order) {
        rows2.push_back(rows[i]);
        y2.push_back(y[i]);
    }
    const auto b = class_centers(from_rows(rows2), y2, 3);
    for (std::size_t i = 0; i < a.centers.data.size(); ++i) EXPECT_NEAR(a.centers.data[i], b.centers.data[i], 1e-14);
}

TEST(Ccd, PointsAtCentersGiveZero) {
    const auto x = from_rows({{1, 1}, {1, 1}, {-2, 0}, {-2, 0}});
    const std::vector<int> y = {0, 0, 1, 1};
    const auto r = ccd(x, y, 2);
    EXPECT_EQ(r.per_class[0], 0.0);
    EXPECT_EQ(r.per_class[1], 0.0);
    EXPECT_EQ(r.mean, 0.0);
}

TEST(Ccd, HandValue) {
    const auto x = from_rows({{0, 0}, {0, 0.2}, {1, 0}, {1, 0.2}});
    const std::vector<int> y = {0, 0, 1, 1};
    const auto r = ccd(x, y, 2);
    EXPECT_NEAR(r.per_class[0], 0.01, 1e-15);
    EXPECT_NEAR(r.per_class[1], 0.01, 1e-15);
}

TEST(Ccd, MatchesBruteForceOracle) {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 4), h = 1 + static_cast<std::size_t>(trial % 5);
        ft::Mat rows(8 * k, ft::Vec(h));
        std::vector<int> y(8 * k);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            y[i] = static_cast<int>(i % k);
            for (auto& v : rows[i]) v = n(rng) + 3.0 * static_cast<double>(y[i]);
        }
        const auto got = ccd(from_rows(rows), y, k);
        const auto want = ft::ccd_ref(rows, y, k);
        double mean = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            EXPECT_NEAR(got.per_class[c], want[c], 1e-12 * std::max(1.0, want[c]));
            mean += want[c] / static_cast<double>(k);
        }
        EXPECT_NEAR(got.mean, mean, 1e-12 * std::max(1.0, mean));
    }
}

TEST(Ccd, AbsentClassIsNanAndSkipped) {
    const auto x = from_rows({{0, 0}, {0, 0.2}, {1, 0}, {1, 0.2}});
    const std::vector<int> y = {0, 0, 2, 2};
    const auto r = ccd(x, y, 3);
    EXPECT_TRUE(std::isnan(r.per_class[1]));
    EXPECT_NEAR(r.mean, 0.01, 1e-15);
}

TEST(Ccd, ErrorsOnDegenerateInput) {
    const auto one = from_rows({{0, 0}, {1, 1}});
    const std::vector<int> same = {1, 1};
    EXPECT_THROW(ccd(one, same, 2), DataError);
    const auto coincident = from_rows({{0, 0}, {0, 0}, {2, 2}});
    const std::vector<int> y = {0, 1, 2};
    try {
        ccd(coincident, y, 3);
        FAIL() << "expected DegenerateGeometryError";
    } catch (const DegenerateGeometryError& e) {
        EXPECT_EQ(e.first(), 0);
        EXPECT_EQ(e.second(), 1);
    }
    const std::vector<int> bad = {0, 5};
    EXPECT_THROW(ccd(one, bad, 2), ParameterError);
}

TEST(Ccd, ScopeSelectsDomainsAndSkipsUnlabeled) {
    Dataset d;
    d.push_back({{0, 0}, 0, Domain::source});
    d.push_back({{0, 0.2}, 0, Domain::source});
    d.push_back({{1, 0}, 1, Domain::source});
    d.push_back({{1, 0.2}, 1, Domain::source});
    d.push_back({{5, 5}, kUnlabeled, Domain::target});
    d.push_back({{0, 0}, 0, Domain::target});
    d.push_back({{0, 2}, 0, Domain::target});
    d.push_back({{1, 0}, 1, Domain::target});
    d.push_back({{1, 2}, 1, Domain::target});
    EXPECT_NEAR(ccd(d, 2, CcdScope::source).mean, 0.01, 1e-15);
    EXPECT_NEAR(ccd(d, 2, CcdScope::target).mean, 1.0, 1e-15);
    EXPECT_GT(ccd(d, 2, CcdScope::both).mean, 0.01);
}

TEST(Ccd, SimilarityInvariance) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    ft::Mat rows(40, ft::Vec(2));
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        y[i] = static_cast<int>(i % 4);
        rows[i] = {n(rng) * 0.3 + y[i], n(rng) * 0.3 - y[i]};
    }
    auto x = from_rows(rows);
    const double base = ccd(x, y, 4).mean;
    apply_shift_inplace(x, ShiftSpec{1.234, {3.0, -7.5}, {2.5, 2.5}});
    EXPECT_NEAR(ccd(x, y, 4).mean, base, 1e-9 * base);
}

TEST(ExtractFeatures, ZeroExtractorGivesZeroColumns) {
    auto model = ModelBundle::create(2, 2, NetConfig{{4}, 3, {4}, 0.2}, 0);
    model.extractor = Mlp::zeros(model.extractor.arch());
    GaussianDomainsSpec spec;
    spec.num_classes = 2;
    spec.per_class = 10;
    const auto [s, t] = gen_gaussian_domains(spec);
    const auto f = extract_features(model, Dataset::concat(s, t));
    EXPECT_EQ(f.width(), 3u);
    EXPECT_EQ(f.size(), 40u);
    for (double v : f.features.data) EXPECT_EQ(v, 0.0);
}

TEST(ExtractFeatures, CapIsDeterministicPerDomainAndOrdered) {
    const auto model = ModelBundle::create(2, 4, NetConfig{}, 3);
    GaussianDomainsSpec spec;
    spec.per_class = 30;
    const auto [s, t] = gen_gaussian_domains(spec);
    const auto all = Dataset::concat(s, t);
    const auto a = extract_features(model, all, 50, 9);
    const auto b = extract_features(model, all, 50, 9);
    const auto c = extract_features(model, all, 50, 10);
    EXPECT_EQ(a.size(), 100u);
    EXPECT_EQ(a.features.data, b.features.data);
    EXPECT_NE(a.features.data, c.features.data);
    EXPECT_EQ(a.of_domain(Domain::source).size(), 50u);
    EXPECT_TRUE(std::is_sorted(a.domains.begin(), a.domains.end()));
}

TEST(ExtractFeatures, WidthMismatchThrows) {
    const auto model = ModelBundle::create(3, 2, NetConfig{{4}, 3, {4}, 0.2}, 0);
    Dataset d;
    d.push_back({{1, 2}, 0, Domain::source});
    EXPECT_THROW(extract_features(model, d), ShapeError);
}

TEST(DumpFeatures, ReloadedCcdMatches) {
    const auto model = ModelBundle::create(2, 4, NetConfig{}, 5);
    GaussianDomainsSpec spec;
    spec.per_class = 40;
    const auto [s, t] = gen_gaussian_domains(spec);
    const auto path = std::filesystem::temp_directory_path() / "fgda_dump_test.csv";
    const auto dumped = dump_features(model, Dataset::concat(s, t), path, 0, 0);
    const auto back = load_csv_dataset(path, 4);
    std::filesystem::remove(path);
    EXPECT_EQ(back.features.data, dumped.features.data);
    EXPECT_NEAR(ccd(back, 4).mean, ccd(dumped, 4).mean, 1e-12);
}
