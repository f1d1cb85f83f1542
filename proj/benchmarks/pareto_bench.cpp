#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "pors/pareto.hpp"
#include "pors/ssf.hpp"

namespace {

using namespace pors;

void BM_Hypervolume(benchmark::State& state) {
    const auto points = bench::arc_front(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(hypervolume(points));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hypervolume)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_MakeParetoFront(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    std::vector<RuleSubset> solutions;
    for (std::size_t i = 0; i < n; ++i) {
        RuleSubset s;
        s.members = {static_cast<RuleIndex>(i)};
        s.objective = ObjectivePoint{rng.uniform(), rng.uniform(), std::nullopt};
        solutions.push_back(std::move(s));
    }
    for (auto _ : state) benchmark::DoNotOptimize(make_pareto_front(solutions));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MakeParetoFront)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

ParetoFront front_of(std::size_t n) {
    std::vector<RuleSubset> solutions;
    const auto points = bench::arc_front(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        RuleSubset s;
        s.members = {static_cast<RuleIndex>(i)};
        s.objective = points[i];
        solutions.push_back(std::move(s));
    }
    return make_pareto_front(std::move(solutions));
}

void BM_Ssf(benchmark::State& state) {
    const auto kind = static_cast<SsfKind>(state.range(0));
    const auto front = front_of(static_cast<std::size_t>(state.range(1)));
    SsfMethod m;
    m.kind = kind;
    m.k = 10;
    state.SetLabel(std::string(ssf_name(kind)));
    for (auto _ : state) benchmark::DoNotOptimize(select_ssf(front, m));
}
BENCHMARK(BM_Ssf)->ArgsProduct({{0, 1, 3, 4, 5, 6, 7}, {50, 200}});

}  // namespace
