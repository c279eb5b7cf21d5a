#include <benchmark/benchmark.h>

#include <cmath>
#include <filesystem>

#include "gmrobust/gmrobust.hpp"

namespace {

using namespace gmrobust;

Network load(const char* name) {
    return load_model_file(std::filesystem::path(GMROBUST_FIXTURE_DIR) / name);
}

// Random layers at the 100-256-512-1024-784 generator scale.
Network wide_generator() {
    RngStream rng(5, 0);
    const std::size_t widths[] = {100, 256, 512, 1024, 784};
    std::vector<Layer> layers;
    for (std::size_t i = 0; i + 1 < std::size(widths); ++i) {
        const double sd = 1.0 / std::sqrt(static_cast<double>(widths[i]));
        layers.push_back(Layer{Tensor::matrix(widths[i + 1], widths[i], gaussian_values(rng, widths[i] * widths[i + 1], sd)),
                               Tensor::zeros({widths[i + 1]}),
                               i + 2 == std::size(widths) ? Activation::tanh : Activation::relu});
    }
    return Network(Role::generator, std::move(layers));
}

void BM_ForwardDemo(benchmark::State& state) {
    const Network net = compose(load("demo_generator_8x8.nnw"), load("demo_classifier_8x8.nnw"));
    ForwardWorkspace ws(net);
    const std::vector<double> x{0.1, -0.2, 0.3, 0.4};
    for (auto _ : state) {
        benchmark::DoNotOptimize(ws.classify(x));
    }
}
BENCHMARK(BM_ForwardDemo);

void BM_ForwardWideGenerator(benchmark::State& state) {
    const Network net = wide_generator();
    ForwardWorkspace ws(net);
    RngStream rng(1, 1);
    const auto x = gaussian_values(rng, 100);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ws.run(x).data());
    }
}
BENCHMARK(BM_ForwardWideGenerator)->Unit(benchmark::kMicrosecond);

void BM_ForwardBatchWideGenerator(benchmark::State& state) {
    const Network net = wide_generator();
    const auto batch = static_cast<std::size_t>(state.range(0));
    RngStream rng(1, 2);
    const auto x = gaussian_values(rng, 100 * batch);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward_batch(net, x, batch).data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_ForwardBatchWideGenerator)->Arg(1)->Arg(32)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Ibp(benchmark::State& state) {
    const Network net = compose(load("demo_generator_8x8.nnw"), load("demo_classifier_8x8.nnw"));
    const IntervalVector box = IntervalVector::ball(Tensor::vector({0.1, -0.2, 0.3, 0.4}), 0.05);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ibp_propagate(net, box));
    }
}
BENCHMARK(BM_Ibp);

void BM_Gradient(benchmark::State& state) {
    const Network net = compose(load("demo_generator_8x8.nnw"), load("demo_classifier_8x8.nnw"));
    ForwardWorkspace ws(net);
    const std::vector<double> x{0.1, -0.2, 0.3, 0.4};
    std::vector<double> g(4);
    for (auto _ : state) {
        ws.gradient(x, 3, g);
        benchmark::DoNotOptimize(g.data());
    }
}
BENCHMARK(BM_Gradient);

void BM_GridFalsify400(benchmark::State& state) {
    const Network net = compose(load("tanh_generator_2d.nnw"), load("relu_classifier_2d.nnw"));
    const Tensor x = Tensor::vector({0.2, 0.1});
    const std::size_t c = classify(net, x).category;
    for (auto _ : state) {
        benchmark::DoNotOptimize(grid_falsify(net, x, 0.01, c, 400));
    }
}
BENCHMARK(BM_GridFalsify400)->Unit(benchmark::kMillisecond);

void BM_EstimateCorrectness(benchmark::State& state) {
    const Network c = load("demo_classifier_8x8.nnw");
    const Network g = load("demo_generator_8x8.nnw");
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_global_correctness(c, g, 3, 10000, 7).successes);
    }
}
BENCHMARK(BM_EstimateCorrectness)->Unit(benchmark::kMillisecond);

void BM_EstimateRobustness(benchmark::State& state) {
    const Network c = load("relu_classifier_2d.nnw");
    const Network g = load("tanh_generator_2d.nnw");
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_global_robustness(c, g, 1, 0.05, 2000, 7, 16).certified);
    }
}
BENCHMARK(BM_EstimateRobustness)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
