// Microbenchmarks for the hot paths: per-report monitor ingestion, the betting
// state update, the counting-test boundary, and group enumeration.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <memory>
#include <vector>

#include "repmon/betting.hpp"
#include "repmon/groups.hpp"
#include "repmon/monitor.hpp"
#include "repmon/rng.hpp"
#include "repmon/ztest.hpp"

namespace {

using namespace repmon;

std::shared_ptr<const CovariateSchema> surveillance_schema() {
  return std::make_shared<const CovariateSchema>(std::vector<Covariate>{
      {"sex", {"M", "F"}},
      {"age",
       {"12-17", "18-29", "30-39", "40-49", "50-59", "60-69", "70-79", "80+", "unknown"}},
  });
}

GroupSet surveillance_groups(const std::shared_ptr<const CovariateSchema>& schema) {
  auto table = ReferenceTable::marginals(
      schema, {{48, 52}, {6, 16, 17, 16, 14, 13, 10, 6, 2}});
  return make_group_set(schema, 2, table, true);
}

std::vector<Assignment> synthetic_stream(const CovariateSchema& schema, std::size_t n) {
  SplitMix64 rng(1);
  std::vector<Assignment> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(schema,
                     std::vector<std::size_t>{rng.next_below(2), rng.next_below(9)});
  }
  return out;
}

void BM_MonitorIngest(benchmark::State& state) {
  auto schema = surveillance_schema();
  auto gs = surveillance_groups(schema);
  MonitorConfig cfg;
  cfg.alpha = 0.1;
  cfg.betas = {1.5, 2.0, 3.0};
  cfg.algorithm = static_cast<Algorithm>(state.range(0));
  auto stream = synthetic_stream(*schema, 4096);
  Monitor m(gs, cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.ingest(stream[i]));
    i = (i + 1) & 4095;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_MonitorIngest)
    ->Arg(static_cast<int>(Algorithm::kFiniteZ))
    ->Arg(static_cast<int>(Algorithm::kAsymptoticZ))
    ->Arg(static_cast<int>(Algorithm::kBetting));

void BM_BetStep(benchmark::State& state) {
  SplitMix64 rng(2);
  std::vector<bool> draws;
  draws.reserve(4096);
  for (int i = 0; i < 4096; ++i) draws.push_back(rng.bernoulli(0.3));
  BetState st;
  std::size_t i = 0;
  for (auto _ : state) {
    st.step(draws[i], 0.2);
    benchmark::DoNotOptimize(st.log_wealth);
    i = (i + 1) & 4095;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_BetStep);

void BM_CountingBoundary(benchmark::State& state) {
  ZTestParams p;
  p.beta_mu0 = 0.1;
  p.alpha_eff = 0.1 / 29;
  p.variant = ZVariant::kFiniteSample;
  std::uint64_t t = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(zt_threshold(t, p));
    t = t % 100000 + 1;
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}
BENCHMARK(BM_CountingBoundary);

void BM_EnumerateGroups(benchmark::State& state) {
  auto schema = surveillance_schema();
  auto table = ReferenceTable::marginals(
      schema, {{48, 52}, {6, 16, 17, 16, 14, 13, 10, 6, 2}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        make_group_set(schema, static_cast<std::size_t>(state.range(0)), table, true));
  }
}
BENCHMARK(BM_EnumerateGroups)->Arg(1)->Arg(2);

void BM_Shuffle(benchmark::State& state) {
  std::vector<std::uint64_t> v(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  SplitMix64 rng(3);
  for (auto _ : state) {
    rng.shuffle(v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Shuffle)->Arg(1024)->Arg(65536);

}  // namespace

BENCHMARK_MAIN();
