#include <benchmark/benchmark.h>

#include <vector>

#include "codev/eventstudy.hpp"
#include "codev/rng.hpp"
#include "codev/series.hpp"
#include "codev/stats.hpp"
#include "codev/synthgen.hpp"

using namespace codev;

namespace {

std::vector<double> noisy_series(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

void BM_RollingSpearman(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  auto x = noisy_series(n, 1);
  auto y = noisy_series(n, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(series::rolling_spearman(x, y, 120));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_RollingSpearman)->Arg(365)->Arg(1500)->Arg(3000);

void BM_CorrelationPanel(benchmark::State& state) {
  synthgen::PanelSpec spec;
  spec.n_assets = static_cast<int>(state.range(0));
  spec.days = 600;
  spec.base_rho = 0.1;
  spec.seed = 3;
  auto gp = synthgen::gen_panel(spec);
  series::PanelOptions opt;
  opt.window = 120;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        series::compute_correlation_panel(gp.panel, {}, opt));
  auto pairs = spec.n_assets * (spec.n_assets - 1) / 2;
  state.SetItemsProcessed(state.iterations() * pairs * spec.days);
}
BENCHMARK(BM_CorrelationPanel)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_BootstrapMeanCurve(benchmark::State& state) {
  Rng rng(4);
  eventstudy::AlignedPanel panel;
  panel.d_min = -180;
  panel.d_max = 400;
  for (int r = 0; r < 50; ++r) {
    std::vector<double> row(panel.n_cols());
    for (auto& v : row) v = rng.normal();
    panel.row_ids.push_back(std::to_string(r));
    panel.cells.push_back(row);
  }
  panel.n_d.assign(panel.n_cols(), 50);
  auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(eventstudy::bootstrap_mean_curve(panel, n, 5));
  state.SetItemsProcessed(state.iterations() * n * panel.n_cols());
}
BENCHMARK(BM_BootstrapMeanCurve)
    ->Arg(1000)
    ->Arg(10000)
    ->Unit(benchmark::kMillisecond);

void BM_McmcSigmoidFit(benchmark::State& state) {
  std::vector<double> x, y;
  for (int d = -180; d <= 400; ++d) {
    x.push_back(d);
    y.push_back(0.3 + 0.35 / (1.0 + std::exp(-(d - 20.0) / 25.0)));
  }
  stats::FitOptions opt;
  opt.n_steps = static_cast<std::size_t>(state.range(0));
  opt.seed = 6;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        stats::mcmc_curve_fit(stats::FitModel::Sigmoid, x, y, {}, opt));
}
BENCHMARK(BM_McmcSigmoidFit)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
