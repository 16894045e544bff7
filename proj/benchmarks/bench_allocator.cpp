#include <benchmark/benchmark.h>

#include "lbsim/allocator.hpp"
#include "lbsim/rng.hpp"

using namespace lbsim;

namespace {

LinkAllocState saturated_state(int commodities, std::int64_t budget) {
    Rng rng(99, 0);
    LinkAllocState s;
    s.budget = budget;
    s.K = 10.0;
    for (int d = 0; d < commodities; ++d) {
        s.add(d + 1, 2 * budget + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(budget))),
              static_cast<std::int64_t>(rng.below(64)), 0);
    }
    s.normalize();
    return s;
}

} // namespace

static void BM_allocate_direct(benchmark::State& state) {
    Rng rng(7, 0);
    LinkAllocState s;
    s.budget = 1000;
    s.K = 10.0;
    for (int d = 0; d < static_cast<int>(state.range(0)); ++d)
        s.add(d + 1, static_cast<std::int64_t>(rng.below(400)), static_cast<std::int64_t>(rng.below(400)),
              static_cast<std::int64_t>(rng.below(100)));
    s.normalize();
    for (auto _ : state) {
        benchmark::DoNotOptimize(allocate_rates(s));
    }
}
BENCHMARK(BM_allocate_direct)->Arg(2)->Arg(9);

static void BM_packet_fill_unaccelerated(benchmark::State& state) {
    const auto s = saturated_state(9, state.range(0));
    const Rational k = compute_k(compute_request(s), s.budget, s.K);
    for (auto _ : state) {
        benchmark::DoNotOptimize(packet_fill(s, k, FillMode::Unaccelerated));
    }
}
BENCHMARK(BM_packet_fill_unaccelerated)->Arg(300)->Arg(2000);

static void BM_packet_fill_accelerated(benchmark::State& state) {
    const auto s = saturated_state(9, state.range(0));
    const Rational k = compute_k(compute_request(s), s.budget, s.K);
    for (auto _ : state) {
        benchmark::DoNotOptimize(packet_fill(s, k, FillMode::Accelerated));
    }
}
BENCHMARK(BM_packet_fill_accelerated)->Arg(300)->Arg(2000);
