#include <benchmark/benchmark.h>

#include "retire/policy.hpp"
#include "retire/simulate.hpp"

using namespace retire;

static void BM_SolveBaseline(benchmark::State& state) {
    const ModelParams p = baseline();
    for (auto _ : state) benchmark::DoNotOptimize(solve_model(p));
}
BENCHMARK(BM_SolveBaseline)->Unit(benchmark::kMillisecond);

static void BM_SolveConstrainedPost(benchmark::State& state) {
    ModelParams p = baseline();
    p.R_post = 20.0;
    for (auto _ : state) benchmark::DoNotOptimize(solve_model(p));
}
BENCHMARK(BM_SolveConstrainedPost)->Unit(benchmark::kMillisecond);

static void BM_LambdaStar(benchmark::State& state) {
    const Model m = solve_model(baseline());
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lambda_star(m.pre, m.post, x));
        x = x > 160.0 ? 0.0 : x + 1.7;
    }
}
BENCHMARK(BM_LambdaStar);

static void BM_SimulatedSteps(benchmark::State& state) {
    const Model m = solve_model(baseline());
    SimConfig cfg;
    cfg.n_paths = 200;
    cfg.horizon_T = 50.0;
    cfg.threads = 1;
    double steps = 0.0;
    for (auto _ : state) {
        const PreRunResult r = run_pre_retirement(m.params, m.constants, m.pre, m.post, 150.0, cfg);
        steps += r.mean_steps * double(cfg.n_paths);
    }
    state.counters["steps"] = benchmark::Counter(steps, benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulatedSteps)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
