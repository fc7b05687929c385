#include <benchmark/benchmark.h>

#include <random>

#include "fgda/analysis.hpp"
#include "fgda/datagen.hpp"
#include "fgda/losses.hpp"
#include "fgda/ops.hpp"
#include "fgda/trainer.hpp"

using namespace fgda;

namespace {

Tensor random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed, bool grad = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    std::vector<double> v(rows * cols);
    for (auto& x : v) x = n(rng);
    return Tensor::from({rows, cols}, v, grad);
}

void BM_MatmulForwardBackward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto a = random_tensor(64, n, 1, true);
    auto b = random_tensor(n, n, 2, true);
    for (auto _ : state) {
        a.clear_grad();
        b.clear_grad();
        backward(sum(matmul(a, b)));
        benchmark::DoNotOptimize(b.grad().data());
    }
}
BENCHMARK(BM_MatmulForwardBackward)->Arg(16)->Arg(64)->Arg(128);

void BM_AdaptIterations(benchmark::State& state) {
    TrainConfig c;
    c.strategy = static_cast<Strategy>(state.range(0));
    c.per_class = 200;
    c.pretrain_iters = 50;
    c.adapt_iters = 50;
    const auto [s, t] = gen_gaussian_domains(c.data_spec(0));
    const auto pre = pretrain_source(c, s, 0);
    const auto target = t.without_labels();
    for (auto _ : state) {
        auto r = adapt(c, pre.model.clone(), s, target, 0);
        benchmark::DoNotOptimize(r.trace.seg.data());
    }
    state.SetItemsProcessed(state.iterations() * c.adapt_iters);
    state.SetLabel(to_string(c.strategy));
}
BENCHMARK(BM_AdaptIterations)
    ->Arg(static_cast<int>(Strategy::source_only))
    ->Arg(static_cast<int>(Strategy::binary))
    ->Arg(static_cast<int>(Strategy::soft))
    ->Unit(benchmark::kMillisecond);

void BM_Ccd(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_tensor(n, 16, 3);
    Matrix m(n, 16);
    m.data.assign(x.values().begin(), x.values().end());
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(i % 4);
    for (auto _ : state) benchmark::DoNotOptimize(ccd(m, y, 4).mean);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Ccd)->Arg(400)->Arg(4000);

} // namespace

BENCHMARK_MAIN();
