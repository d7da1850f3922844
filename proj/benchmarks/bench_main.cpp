#include <benchmark/benchmark.h>

#include <vector>

#include "robosnn/loss.hpp"
#include "robosnn/optim.hpp"
#include "robosnn/rng.hpp"

namespace {

using namespace robosnn;

std::vector<double> residuals(std::size_t n) {
  Rng rng(1);
  std::vector<double> r(n);
  for (auto& x : r) x = rng.uniform(-5.0, 5.0);
  return r;
}

void BM_LossGrad(benchmark::State& state) {
  const LossSpec specs[] = {LossSpec::square(), LossSpec::absolute(), LossSpec::huber(1.0), LossSpec::log_cosh(),
                            LossSpec::robos(3.0, 1.0, 0.03)};
  const LossSpec& spec = specs[state.range(0)];
  const auto r = residuals(4096);
  for (auto _ : state) {
    double acc = 0.0;
    for (double x : r) acc += loss_value(spec, x) + loss_grad(spec, x);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(r.size()));
  state.SetLabel(spec.to_string());
}
BENCHMARK(BM_LossGrad)->DenseRange(0, 4);

void BM_ForwardBackward(benchmark::State& state) {
  const auto units = static_cast<std::size_t>(state.range(0));
  const Network net = init_network(mlp_dims(30, 2, units), 1);
  GradientBuffer grad = GradientBuffer::zeros_like(net);
  ForwardCache cache;
  const std::vector<double> x(30, 0.25);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(net, x, cache));
    accumulate_backward(net, cache, 1.0, grad);
  }
  state.counters["params"] = static_cast<double>(net.parameter_count());
}
BENCHMARK(BM_ForwardBackward)->RangeMultiplier(2)->Range(16, 256);

void BM_TrainEpoch(benchmark::State& state) {
  const Series s = synthetic_ar1(2000, 0.9, 1.0, 7, 10.0);
  const WindowedDataset data = window_and_split(s, 30);
  TrainConfig cfg;
  cfg.max_epochs = 1;
  cfg.batch_size = 32;
  cfg.loss = LossSpec::robos(3.0, 1.0, 0.03);
  const Network net = init_network(mlp_dims(30, 2, 64), 1);
  for (auto _ : state) benchmark::DoNotOptimize(train(net, data, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(data.train_size()));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
