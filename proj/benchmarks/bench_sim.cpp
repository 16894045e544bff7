#include <benchmark/benchmark.h>

#include "lbsim/scenario.hpp"
#include "lbsim/sim.hpp"

using namespace lbsim;

namespace {

ScenarioConfig line_config(std::int64_t horizon) {
    ScenarioConfig cfg;
    cfg.name = "bench-line";
    cfg.topology.switches = {1, 2, 3, 4};
    cfg.topology.commodities = {1, 2};
    for (int i = 1; i <= 3; ++i) cfg.topology.link_capacity[{i, i + 1}] = 10;
    for (int d = 1; d <= 2; ++d) {
        cfg.topology.dest_capacity[{4, d}] = 10;
        for (int i = 1; i <= 3; ++i) cfg.topology.next_hops[{i, d}] = {i + 1};
    }
    cfg.arrivals.processes.push_back({1, 1, ArrivalKind::UniformInt, 0, 4, 10, 0.0});
    cfg.arrivals.processes.push_back({1, 2, ArrivalKind::UniformInt, 0, 0, 4, 0.0});
    cfg.T = 100;
    cfg.horizon = horizon;
    cfg.digest = fnv1a(dump_scenario(cfg));
    return cfg;
}

} // namespace

static void BM_line_run(benchmark::State& state) {
    auto cfg = line_config(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_ideal(cfg));
    }
}
BENCHMARK(BM_line_run)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_line_run_unchecked(benchmark::State& state) {
    auto cfg = line_config(state.range(0));
    RunOptions opt;
    opt.check_invariants = false;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_ideal(cfg, opt));
    }
}
BENCHMARK(BM_line_run_unchecked)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
