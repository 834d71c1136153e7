#include <benchmark/benchmark.h>

#include <omp.h>

#include "gbart/grouping.hpp"
#include "gbart/kernels.hpp"

using namespace gbart;

namespace {

const FitResult& fitted_model() {
  static const FitResult fit = [] {
    McmcConfig c;
    c.ndpost = 100;
    c.burn_in = 50;
    return fit_grouped(generate_synthetic(12, 500, 1), Partition::trivial(7), 200, c, 1);
  }();
  return fit;
}

const Matrix& query_rows() {
  static const Matrix X = generate_synthetic(12, 2000, 2).X;
  return X;
}

void BM_PredictSerial(benchmark::State& state) {
  const auto& fit = fitted_model();
  const auto& X = query_rows();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::predict_serial(fit, X));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(X.rows()));
}
BENCHMARK(BM_PredictSerial)->Unit(benchmark::kMillisecond);

void BM_PredictParallel(benchmark::State& state) {
  const auto& fit = fitted_model();
  const auto& X = query_rows();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::predict_parallel(fit, X));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(X.rows()));
  omp_set_num_threads(omp_get_num_procs());
}
BENCHMARK(BM_PredictParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_GroupSearch(benchmark::State& state) {
  const Dataset d = generate_synthetic(2, 300, 3);
  GroupSearchConfig cfg;
  cfg.stage1_trees = 50;
  McmcConfig c;
  c.ndpost = 100;
  c.burn_in = 50;
  cfg.stage1_mcmc = c;
  cfg.max_rounds = 1;
  cfg.workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(isg_search(d, cfg, 5));
}
BENCHMARK(BM_GroupSearch)->Arg(1)->Arg(0)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
