#include <benchmark/benchmark.h>

#include "wpinn/losses.hpp"
#include "wpinn/trainer.hpp"

using namespace wpinn;

namespace {

TrainConfig bench_config(int situation_id, Method method, int d, int width) {
  TrainConfig c;
  c.spec = situation(situation_id, d);
  c.method = method;
  c.n1 = 200;
  c.solution_hidden = {width, width, width};
  c.weight_hidden = {16, 16, 16};
  return c;
}

void BM_ForwardBatch(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const int d = 10;
  const MlpParams net = init_params({d + 1, width, width, width, 1},
                                    {Activation::relu3, Activation::relu3, Activation::relu3},
                                    OutputHead::linear(), 1);
  Sampler s(0);
  const Eigen::MatrixXd pts = s.interior(Domain::unit_ball(d), 1.0, 1000);
  for (auto _ : state) benchmark::DoNotOptimize(forward_batch(net, pts));
  state.SetItemsProcessed(state.iterations() * pts.cols());
}
BENCHMARK(BM_ForwardBatch)->Arg(32)->Arg(100);

void BM_Backprop(benchmark::State& state) {
  const int width = static_cast<int>(state.range(0));
  const int d = 10;
  const MlpParams net = init_params({d + 1, width, width, width, 1},
                                    {Activation::relu3, Activation::relu3, Activation::relu3},
                                    OutputHead::linear(), 1);
  Sampler s(0);
  const Eigen::MatrixXd pts = s.interior(Domain::unit_ball(d), 1.0, 1000);
  const Eigen::VectorXd upstream = Eigen::VectorXd::Ones(pts.cols());
  ForwardTape tape;
  for (auto _ : state) {
    forward_batch(net, pts, &tape);
    ParamGrad g = ParamGrad::zeros_like(net);
    accumulate_backprop(net, tape, upstream, g);
    benchmark::DoNotOptimize(g);
  }
  state.SetItemsProcessed(state.iterations() * pts.cols());
}
BENCHMARK(BM_Backprop)->Arg(32)->Arg(100);

void BM_EvaluateLoss(benchmark::State& state) {
  const int id = static_cast<int>(state.range(0));
  const TrainConfig c = bench_config(id, Method::weighted, 3, 32);
  const Networks nets = init_networks(c);
  Sampler s(0, kTrainSampleStream);
  const TrainBatch b = s.batch(c.spec.domain, c.spec.horizon, c.n1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_loss(c.spec, b, nets.u, nets.f, &*nets.weights, true));
  }
}
BENCHMARK(BM_EvaluateLoss)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_MinMaxIteration(benchmark::State& state) {
  const Method method = state.range(0) == 0 ? Method::standard : Method::weighted;
  const TrainConfig c = bench_config(1, method, 3, 32);
  Networks nets = init_networks(c);
  OptimizerStates states = init_optimizers(c, nets);
  Sampler s(0, kTrainSampleStream);
  for (auto _ : state) benchmark::DoNotOptimize(minmax_iteration(c, nets, states, s));
}
BENCHMARK(BM_MinMaxIteration)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
