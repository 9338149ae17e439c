#include <benchmark/benchmark.h>

#include <vector>

#include "flowcurl/metrics.hpp"
#include "flowcurl/mlp.hpp"
#include "flowcurl/ode.hpp"
#include "flowcurl/timestep.hpp"
#include "flowcurl/trainer.hpp"

namespace {

using namespace flowcurl;

const MlpConfig kDesk{2, {256, 256, 256}, 8, Activation::kSiLU};

Matrix normals(std::size_t n, std::size_t d, Rng& rng) {
  Matrix m(n, d);
  for (auto& v : m.values()) v = rng.normal();
  return m;
}

std::vector<double> times(std::size_t n, Rng& rng) {
  std::vector<double> t(n);
  for (auto& v : t) v = rng.uniform();
  return t;
}

void BM_Forward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto params = init_params(kDesk, rng);
  const auto z = normals(batch, 2, rng);
  const auto t = times(batch, rng);
  Matrix out;
  for (auto _ : state) {
    predict(params, kDesk, z, t, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(256)->Arg(8192)->Unit(benchmark::kMicrosecond);

void BM_ForwardBackward(benchmark::State& state) {
  const auto batch = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const auto params = init_params(kDesk, rng);
  const auto z = normals(batch, 2, rng);
  const auto g = normals(batch, 2, rng);
  const auto t = times(batch, rng);
  for (auto _ : state) {
    const auto tape = forward(params, kDesk, z, t);
    auto grads = backward(params, kDesk, tape, g);
    benchmark::DoNotOptimize(grads.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_ForwardBackward)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  TrainConfig cfg;
  cfg.dataset.n_cache = 4096;
  Trainer trainer(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.step().loss);
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_SampleT(benchmark::State& state) {
  const std::vector<StaticDistribution> laws{Uniform{}, LogitNormal{-0.4, 1.0}, Mode{-0.5}, Mode{1.2}};
  const auto& law = laws[static_cast<std::size_t>(state.range(0))];
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(sample_t(law, rng));
  state.SetLabel(render(law));
}
BENCHMARK(BM_SampleT)->DenseRange(0, 3);

void BM_SlicedW2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  const auto a = normals(n, 2, rng);
  const auto b = normals(n, 2, rng);
  for (auto _ : state) {
    Rng proj(5);
    benchmark::DoNotOptimize(sliced_w2(a, b, 128, proj));
  }
}
BENCHMARK(BM_SlicedW2)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_EnergyDistance(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  const auto a = normals(n, 2, rng);
  const auto b = normals(n, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(energy_distance(a, b));
}
BENCHMARK(BM_EnergyDistance)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_MmdMedian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(7);
  const auto a = normals(n, 2, rng);
  const auto b = normals(n, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(mmd_rbf(a, b));
}
BENCHMARK(BM_MmdMedian)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_EulerGenerate(benchmark::State& state) {
  Rng rng(8);
  const auto params = init_params(kDesk, rng);
  const auto nfe = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Rng noise(9);
    auto x = batch_generate(params, kDesk, 1024, {nfe}, noise);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_EulerGenerate)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
