#include <benchmark/benchmark.h>

#include "revmax/allocators.hpp"
#include "revmax/synth.hpp"

using namespace revmax;

namespace {

Instance benchmark_instance(NodeId nodes, AdId ads, std::uint64_t arcs_per_node = 5) {
    SynthParams params;
    params.nodes = nodes;
    params.arcs = arcs_per_node * nodes;
    params.weighted_cascade = true;
    Rng rng(2);
    Instance inst;
    inst.graph = synth_graph(SynthKind::random_directed, params, rng);
    for (AdId i = 0; i < ads; ++i) {
        inst.campaigns.push_back(AdCampaign(i, {1.0}, 1.0, 50.0));
    }
    inst.incentives = build_incentives(inst.graph, inst.campaigns, {IncentiveKind::linear, 0.2},
                                       SpreadSource::out_degree_proxy);
    return inst;
}

void bm_ti_allocator(benchmark::State& state, Algorithm algorithm) {
    const Instance inst = benchmark_instance(static_cast<NodeId>(state.range(0)),
                                             static_cast<AdId>(state.range(1)));
    AllocatorConfig config;
    config.algorithm = algorithm;
    config.epsilon = 0.3;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        config.seed = seed++;
        benchmark::DoNotOptimize(run_allocator(inst, config).allocation.total_revenue());
    }
}

void bm_ti_carm(benchmark::State& state) { bm_ti_allocator(state, Algorithm::ti_carm); }
void bm_ti_csrm(benchmark::State& state) { bm_ti_allocator(state, Algorithm::ti_csrm); }

BENCHMARK(bm_ti_carm)->Args({1000, 2})->Args({1000, 5})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ti_csrm)->Args({1000, 2})->Args({1000, 5})->Unit(benchmark::kMillisecond);

void bm_exact_greedy(benchmark::State& state) {
    const Instance inst = benchmark_instance(12, 2, 2); // 24 arcs: exact-oracle range
    AllocatorConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            cs_greedy(inst.graph, inst.campaigns, inst.incentives, config)
                .allocation.total_revenue());
    }
}
BENCHMARK(bm_exact_greedy)->Unit(benchmark::kMillisecond);

} // namespace
