// Serial reference vs OpenMP path for each per-record kernel.
// Every benchmark takes the policy as its argument: 0 = Serial, 1 = Parallel.

#include <benchmark/benchmark.h>

#include <vector>

#include "nugget/analysis.hpp"
#include "nugget/baselines.hpp"
#include "nugget/dataset.hpp"
#include "nugget/train.hpp"

using namespace nugget;

namespace {

Exec policy(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

GenerationConfig bench_config() {
  GenerationConfig cfg;
  cfg.graph = {GraphModel::BarabasiAlbert, 20, 0.2, 0, 1};
  cfg.game = GameSpec::linear_quadratic(0.6, 1.0);
  cfg.games = 50;
  cfg.normalization = ActionNorm::UnitL2;
  cfg.train = 64;
  cfg.val = 16;
  cfg.test = 32;
  cfg.seed = 5;
  return cfg;
}

const Dataset& bench_dataset() {
  static const Dataset ds = generate_dataset(bench_config());
  return ds;
}

std::vector<const GameSample*> split_ptrs(const Dataset& ds, Split s) {
  std::vector<const GameSample*> out;
  for (std::size_t i : ds.indices(s)) out.push_back(&ds.samples[i]);
  return out;
}

void BM_GenerateDataset(benchmark::State& state) {
  const GenerationConfig cfg = bench_config();
  for (auto _ : state) benchmark::DoNotOptimize(generate_dataset(cfg, policy(state)));
}

void BM_BatchLossGrad(benchmark::State& state) {
  const auto batch = split_ptrs(bench_dataset(), Split::Train);
  Rng rng(1);
  const NuggetParams params = init_params(ModelConfig{}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(batch_loss_grad(params, batch, policy(state)));
}

void BM_Evaluate(benchmark::State& state) {
  Rng rng(1);
  const NuggetParams params = init_params(ModelConfig{}, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_model(params, bench_dataset(), Split::Test, 0.5, policy(state)));
}

void BM_MinEigStats(benchmark::State& state) {
  const GraphSpec er{GraphModel::ErdosRenyi, 20, 0.2, 0, 1};
  const Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(min_abs_nonzero_eig_stats(er, 200, rng, policy(state)));
}

void BM_GlassoTuning(benchmark::State& state) {
  const std::vector<double> grid{1e-2, 1e-1, 1.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        tune_regularization(BaselineMethod::GraphicalLasso, bench_dataset(), grid, policy(state)));
}

}  // namespace

BENCHMARK(BM_GenerateDataset)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchLossGrad)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinEigStats)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GlassoTuning)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
