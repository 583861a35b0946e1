// Wall-clock profiles for the hot paths: risk evaluators over growing
// samples, QP assembly, the embedded solver, and end-to-end training.
// Inputs are seeded so successive runs measure the same problems.

#include "risksvm/build_qp.hpp"
#include "risksvm/evaluation.hpp"
#include "risksvm/risk.hpp"
#include "risksvm/solver.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace {

using risksvm::EmpiricalDistribution;
using risksvm::LabeledDataset;
using risksvm::LossKind;
using risksvm::LossSpec;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> value(0.0, 1.0);
    std::vector<double> values(n);
    for (double& v : values) {
        v = value(rng);
    }
    return values;
}

LabeledDataset two_blob_dataset(int m_per_class, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    LabeledDataset data;
    data.features.resize(2 * m_per_class, dim);
    for (int r = 0; r < 2 * m_per_class; ++r) {
        const int label = r < m_per_class ? 0 : 1;
        for (int c = 0; c < dim; ++c) {
            data.features(r, c) = noise(rng) + (c == 0 ? (label == 0 ? -0.7 : 0.7) : 0.0);
        }
        data.labels.push_back(label);
    }
    for (int c = 0; c < dim; ++c) {
        data.feature_names.push_back("f" + std::to_string(c));
    }
    return data;
}

LossSpec tail_mix_spec() {
    LossSpec spec;
    spec.kind = LossKind::risk_cvar;
    spec.lambda = 0.5;
    spec.alpha2 = 0.75;
    spec.beta = 0.5;
    spec.kappa = 1.0;
    spec.delta = 0.1;
    return spec;
}

void BM_AvarSorted(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const EmpiricalDistribution dist(random_values(n, 42));
    for (auto _ : state) {
        benchmark::DoNotOptimize(risksvm::avar_sorted(dist, 0.25));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AvarSorted)->Range(1 << 10, 1 << 18)->Complexity();

void BM_MeanSemideviation(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const EmpiricalDistribution dist(random_values(n, 43));
    for (auto _ : state) {
        benchmark::DoNotOptimize(risksvm::mean_semideviation(dist, 1.0));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MeanSemideviation)->Range(1 << 10, 1 << 18)->Complexity();

void BM_RocCurve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto scores = random_values(n, 44);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = scores[i] + 0.3 * scores[(i + 1) % n] > 0.0 ? 1 : 0;
    }
    labels[0] = 0;
    labels[1] = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(risksvm::roc(scores, labels));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RocCurve)->Range(1 << 10, 1 << 16)->Complexity();

void BM_BuildQp(benchmark::State& state) {
    const auto data =
        two_blob_dataset(static_cast<int>(state.range(0)), 10, 45);
    const LossSpec spec = tail_mix_spec();
    for (auto _ : state) {
        benchmark::DoNotOptimize(risksvm::build(spec, data));
    }
}
BENCHMARK(BM_BuildQp)->Arg(100)->Arg(400)->Arg(1600);

void BM_SolveTraining(benchmark::State& state) {
    const auto data = two_blob_dataset(static_cast<int>(state.range(0)), 10, 46);
    const auto qp = risksvm::build(tail_mix_spec(), data);
    for (auto _ : state) {
        benchmark::DoNotOptimize(risksvm::solve(qp));
    }
}
BENCHMARK(BM_SolveTraining)->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_TrainEndToEnd(benchmark::State& state) {
    const auto data = two_blob_dataset(static_cast<int>(state.range(0)), 10, 47);
    const LossSpec spec = tail_mix_spec();
    for (auto _ : state) {
        benchmark::DoNotOptimize(risksvm::train(spec, data));
    }
}
BENCHMARK(BM_TrainEndToEnd)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
