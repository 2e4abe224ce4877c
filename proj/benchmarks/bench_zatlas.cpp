#include <benchmark/benchmark.h>

#include "zatlas/pipeline.hpp"

namespace {

void BM_EvalZeta(benchmark::State& state) {
  const zatlas::Complex s(0.5, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(zatlas::eval_zeta(s));
}
BENCHMARK(BM_EvalZeta)->Arg(10)->Arg(100)->Arg(400);

void BM_EvalZetaPair(benchmark::State& state) {
  const zatlas::Complex s(2.5, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(zatlas::eval_zeta_em_pair(s));
}
BENCHMARK(BM_EvalZetaPair)->Arg(10)->Arg(100)->Arg(400);

void BM_Reflection(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(zatlas::eval_zeta({-2.5, 30.0}));
}
BENCHMARK(BM_Reflection);

void BM_StieltjesTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(zatlas::build_stieltjes_table(8, state.range(0)));
}
BENCHMARK(BM_StieltjesTable)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_TraceFirstGamma(benchmark::State& state) {
  zatlas::TraceConfig cfg;
  cfg.domain_box = {-1.0, 10.0, 0.1, 60.0};
  const auto seeds = zatlas::seed_real_axis_preimages(cfg.domain_box, cfg);
  zatlas::Seed first{};
  for (const auto& s : seeds) {
    if (s.kind == zatlas::CurveKind::below_one()) {
      first = s;
      break;
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(zatlas::trace_level_curve(first.s, first.kind, cfg));
}
BENCHMARK(BM_TraceFirstGamma)->Unit(benchmark::kMillisecond);

void BM_BuildAtlas(benchmark::State& state) {
  zatlas::TraceConfig cfg;
  cfg.domain_box = {-1.0, 10.0, 0.1, static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(zatlas::build_atlas(cfg));
}
BENCHMARK(BM_BuildAtlas)->Arg(60)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_ArgumentPrinciple(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(zatlas::argument_principle_count({0.0, 1.0, 0.1, 110.0}));
}
BENCHMARK(BM_ArgumentPrinciple)->Unit(benchmark::kMillisecond);

void BM_ScanT60(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(zatlas::run_scan(zatlas::RunConfig{}));
}
BENCHMARK(BM_ScanT60)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
