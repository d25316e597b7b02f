#include <benchmark/benchmark.h>

#include "kinv/data.hpp"
#include "kinv/kernels.hpp"
#include "kinv/matrix.hpp"
#include "kinv/mlp.hpp"
#include "kinv/optim.hpp"
#include "kinv/rng.hpp"

namespace {

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  kinv::Rng rng(1);
  const kinv::Matrix a = kinv::sample_gaussian(n, n, 1.0, rng);
  const kinv::Matrix b = kinv::sample_gaussian(n, n, 1.0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kinv::matmul(a, b));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256)->Arg(512);

void BM_ForwardBackward(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  kinv::Rng rng(2);
  const auto params = kinv::mlp::init_he(kinv::mlp::MlpConfig{{width, width, width, width, width}}, rng);
  kinv::Matrix batch(64, width);
  for (double& v : batch.data()) v = rng.uniform();
  for (auto _ : state) {
    const auto trace = kinv::mlp::forward_batch(params, batch);
    benchmark::DoNotOptimize(kinv::mlp::backward_batch(params, trace, batch));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_OptimizerStep(benchmark::State& state) {
  const auto rule = static_cast<kinv::optim::Rule>(state.range(0));
  kinv::Rng rng(3);
  auto params = kinv::mlp::init_he(kinv::mlp::MlpConfig{{256, 256, 256, 256, 256}}, rng);
  const auto grads = kinv::mlp::init_he(params.config(), rng);
  auto opt = kinv::optim::OptState::zeros_like(params);
  const kinv::optim::Hyperparams hyper{.rule = rule, .alpha = 1e-6};
  for (auto _ : state) {
    kinv::optim::step(hyper, opt, params, grads);
  }
  state.SetLabel(std::string(kinv::optim::to_string(rule)));
}
BENCHMARK(BM_OptimizerStep)->DenseRange(0, 3);

void BM_KernelCurve(benchmark::State& state) {
  kinv::Rng rng(4);
  const auto ds = kinv::data::synthetic(1024, 256, rng, 0.5);
  const kinv::Matrix w = kinv::sample_gaussian(256, 256, 1.0, rng);
  const auto grid = kinv::kernels::uniform_grid(17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kinv::kernels::kernel_curve(w, ds, grid, true, 64, rng));
  }
}
BENCHMARK(BM_KernelCurve)->Unit(benchmark::kMillisecond);

void BM_ProbePair(benchmark::State& state) {
  kinv::Rng rng(5);
  const auto ds = kinv::data::synthetic(1024, 256, rng, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kinv::kernels::sample_probe_pair(ds, 1.0, true, rng));
  }
}
BENCHMARK(BM_ProbePair);

}  // namespace
BENCHMARK_MAIN();
