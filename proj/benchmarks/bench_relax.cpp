#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "acrelax/acnl.hpp"
#include "acrelax/conemodel.hpp"
#include "acrelax/graphkit.hpp"

using namespace acrelax;

namespace {

const Network& bundled(const std::string& name) {
    static std::map<std::string, Network> cache;
    auto it = cache.find(name);
    if (it == cache.end())
        it = cache.emplace(name, load_case_file(std::string(ACRELAX_BENCH_DATA_DIR) + "/" + name + ".m")).first;
    return it->second;
}

const char* kCases[] = {"case9", "case14", "case30", "case118", "case300"};

void BM_ChordalExtension(benchmark::State& state) {
    const BusGraph g = build_graph(bundled(kCases[state.range(0)]));
    for (auto _ : state) {
        const ChordalExtension ext = chordal_extension(g);
        benchmark::DoNotOptimize(maximal_cliques(ext.graph, ext.ordering));
    }
    state.SetLabel(kCases[state.range(0)]);
}
BENCHMARK(BM_ChordalExtension)->DenseRange(0, 4)->Unit(benchmark::kMicrosecond);

void BM_BuildSdp(benchmark::State& state) {
    const Network& net = bundled(kCases[state.range(0)]);
    for (auto _ : state) benchmark::DoNotOptimize(build_sdp(net));
    state.SetLabel(kCases[state.range(0)]);
}
BENCHMARK(BM_BuildSdp)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

template <Relaxation R>
void BM_SolveRelaxation(benchmark::State& state) {
    const Network& net = bundled(kCases[state.range(0)]);
    const ConicModel m = R == Relaxation::socp ? build_socp(net) : build_sdp(net);
    int iterations = 0;
    for (auto _ : state) {
        const IpmResult r = solve(m.program);
        iterations = r.iterations;
        benchmark::DoNotOptimize(r.primal_objective);
    }
    state.counters["ipm_iterations"] = iterations;
    state.SetLabel(kCases[state.range(0)]);
}
BENCHMARK(BM_SolveRelaxation<Relaxation::socp>)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveRelaxation<Relaxation::sdp>)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_SolveAcopf(benchmark::State& state) {
    const Network& net = bundled(kCases[state.range(0)]);
    for (auto _ : state) benchmark::DoNotOptimize(solve_acopf(net, flat_profile(net)).objective);
    state.SetLabel(kCases[state.range(0)]);
}
BENCHMARK(BM_SolveAcopf)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
