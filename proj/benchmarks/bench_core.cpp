#include <benchmark/benchmark.h>

#include "zsreg/evaluation.hpp"
#include "zsreg/methods.hpp"
#include "zsreg/regression.hpp"
#include "zsreg/stats.hpp"
#include "zsreg/synthetic.hpp"

namespace {

zsreg::Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  zsreg::Rng rng(seed);
  return zsreg::draw_uniform_gap(rows, cols, rng);
}

void BM_FitRidge(benchmark::State& state) {
  const auto n = state.range(0);
  const zsreg::Matrix X = random_matrix(n, 50, 1);
  const zsreg::Vector y = random_matrix(n, 1, 2).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(zsreg::fit_ridge(X, y, 1.0));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_FitRidge)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_GridSearchRidge(benchmark::State& state) {
  const zsreg::Matrix X = random_matrix(state.range(0), 50, 3);
  const zsreg::Vector y = random_matrix(state.range(0), 1, 4).col(0);
  const auto spec = zsreg::RegressorSpec::ridge();
  for (auto _ : state) benchmark::DoNotOptimize(zsreg::grid_search_fit(X, y, spec, 0));
}
BENCHMARK(BM_GridSearchRidge)->Arg(1000)->Arg(10000);

void BM_FitEpsInsensitive(benchmark::State& state) {
  const zsreg::Matrix X = random_matrix(state.range(0), 10, 5);
  const zsreg::Vector y = X * zsreg::Vector::LinSpaced(10, -1.0, 1.0) + random_matrix(state.range(0), 1, 6).col(0);
  auto spec = zsreg::RegressorSpec::epsilon_insensitive();
  spec.tol = 1e-4;
  for (auto _ : state) benchmark::DoNotOptimize(zsreg::fit_eps_insensitive(X, y, 1.0, spec));
}
BENCHMARK(BM_FitEpsInsensitive)->Arg(200)->Arg(2000);

void BM_EvaluateFold(benchmark::State& state) {
  zsreg::GenSpec g;
  g.kind = zsreg::GenKind::R;
  g.instances = 1000;
  g.targets = 50;
  g.side = 5;
  const auto ds = zsreg::generate(g).dataset;
  const auto plan = zsreg::make_plan(ds, 0);
  const char* names[] = {"baseline", "sr-euclidean", "mplc"};
  const auto method = zsreg::MethodSpec::from_name(names[state.range(0)], zsreg::RegressorSpec::ridge());
  state.SetLabel(names[state.range(0)]);
  for (auto _ : state) benchmark::DoNotOptimize(zsreg::evaluate_fold(ds, method, plan, 0, 0));
}
BENCHMARK(BM_EvaluateFold)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_WilcoxonExact(benchmark::State& state) {
  const zsreg::Matrix a = random_matrix(25, 1, 7);
  const zsreg::Matrix b = random_matrix(25, 1, 8);
  for (auto _ : state) benchmark::DoNotOptimize(zsreg::wilcoxon_signed_rank(a.col(0), b.col(0)));
}
BENCHMARK(BM_WilcoxonExact);

}  // namespace

BENCHMARK_MAIN();
