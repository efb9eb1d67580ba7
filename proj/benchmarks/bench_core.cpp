#include "betatails/ensembles.hpp"
#include "betatails/lpp.hpp"
#include "betatails/profiles.hpp"
#include "betatails/rng.hpp"
#include "betatails/stats.hpp"
#include "betatails/tridiag.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace betatails;

static void BM_Normal(benchmark::State& state) {
  rng::RngStream s(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s.normal());
}
BENCHMARK(BM_Normal);

static void BM_Chi(benchmark::State& state) {
  rng::RngStream s(1, 0);
  const rng::Dof k(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rng::sample_chi(s, k));
}
BENCHMARK(BM_Chi)->Arg(1)->Arg(100)->Arg(1000);

static void BM_FillRow(benchmark::State& state) {
  const auto f = lpp::WeightField::exponential(7);
  std::vector<double> row(static_cast<std::size_t>(state.range(0)));
  std::int64_t i = 0;
  for (auto _ : state) {
    f.fill_row(i++, 0, row);
    benchmark::DoNotOptimize(row.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FillRow)->Arg(1024);

static void BM_SampleHermite(benchmark::State& state) {
  const auto spec = ensembles::EnsembleSpec::hermite(2.0, static_cast<std::size_t>(state.range(0)));
  std::uint64_t r = 0;
  for (auto _ : state) {
    rng::RngStream s(3, r++);
    benchmark::DoNotOptimize(ensembles::sample_hermite(spec, s));
  }
}
BENCHMARK(BM_SampleHermite)->Arg(500);

static void BM_SturmCount(benchmark::State& state) {
  rng::RngStream s(4, 0);
  const auto t = ensembles::sample_hermite(ensembles::EnsembleSpec::hermite(2.0, static_cast<std::size_t>(state.range(0))), s);
  for (auto _ : state) benchmark::DoNotOptimize(tridiag::sturm_count(t, 2.0 * std::sqrt(static_cast<double>(state.range(0)))));
}
BENCHMARK(BM_SturmCount)->Arg(500)->Arg(8000);

static void BM_LambdaMax(benchmark::State& state) {
  rng::RngStream s(5, 0);
  const auto t = ensembles::sample_hermite(ensembles::EnsembleSpec::hermite(2.0, static_cast<std::size_t>(state.range(0))), s);
  for (auto _ : state) benchmark::DoNotOptimize(tridiag::lambda_max(t, 1e-10));
}
BENCHMARK(BM_LambdaMax)->Arg(500);

static void BM_HermiteTailReplicate(benchmark::State& state) {
  const auto sampler = stats::matrix_tail_sampler(ensembles::EnsembleSpec::hermite(2.0, 500));
  std::uint64_t r = 0;
  for (auto _ : state) {
    const auto rep = sampler->draw(6, r++);
    benchmark::DoNotOptimize(rep->hit(stats::Side::right, 1.0));
  }
}
BENCHMARK(BM_HermiteTailReplicate);

static void BM_PassageP2P(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::uint64_t k = 0;
  for (auto _ : state) {
    const auto f = lpp::WeightField::exponential(k++);
    benchmark::DoNotOptimize(lpp::passage_p2p(f, {0, 0}, {n, n}));
  }
  state.SetItemsProcessed(state.iterations() * (n + 1) * (n + 1));
}
BENCHMARK(BM_PassageP2P)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_Geodesic(benchmark::State& state) {
  const std::int64_t n = state.range(0);
  std::uint64_t k = 0;
  for (auto _ : state) {
    const auto f = lpp::WeightField::exponential(k++);
    benchmark::DoNotOptimize(lpp::geodesic(f, {0, 0}, {n, n}));
  }
  state.SetItemsProcessed(state.iterations() * (n + 1) * (n + 1));
}
BENCHMARK(BM_Geodesic)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_RiccatiWalk(benchmark::State& state) {
  std::uint64_t r = 0;
  for (auto _ : state) {
    rng::RngStream s(8, r++);
    benchmark::DoNotOptimize(profiles::riccati_walk(8000, 2.0, 2.0, s));
  }
}
BENCHMARK(BM_RiccatiWalk);

static void BM_RateFunction(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(stats::laguerre_rate_function(1e-4));
}
BENCHMARK(BM_RateFunction)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
