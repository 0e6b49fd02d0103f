#include <benchmark/benchmark.h>

#include "revmax/rr.hpp"
#include "revmax/synth.hpp"
#include "revmax/tic.hpp"

using namespace revmax;

namespace {

Graph benchmark_graph(NodeId nodes, std::uint64_t arcs) {
    SynthParams params;
    params.nodes = nodes;
    params.arcs = arcs;
    params.weighted_cascade = true;
    Rng rng(1);
    return synth_graph(SynthKind::random_directed, params, rng);
}

void bm_rr_sampling(benchmark::State& state) {
    const Graph g = benchmark_graph(static_cast<NodeId>(state.range(0)), 5 * state.range(0));
    const AdCampaign campaign(0, {1.0}, 1.0, 100.0);
    RRSampler sampler(g, campaign);
    Rng rng(7);
    std::uint64_t members = 0;
    for (auto _ : state) {
        members += sampler.sample(rng).members.size();
    }
    benchmark::DoNotOptimize(members);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_rr_sampling)->Arg(1000)->Arg(10000);

void bm_extend_sample(benchmark::State& state) {
    const Graph g = benchmark_graph(1000, 5000);
    const AdCampaign campaign(0, {1.0}, 1.0, 100.0);
    Rng rng(7);
    for (auto _ : state) {
        RRSample sample(0, g.node_count());
        extend_sample(sample, g, campaign, static_cast<std::uint64_t>(state.range(0)), rng);
        benchmark::DoNotOptimize(sample.theta());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_extend_sample)->Arg(10000)->Arg(100000);

void bm_selection_scan(benchmark::State& state) {
    const Graph g = benchmark_graph(1000, 5000);
    const AdCampaign campaign(0, {1.0}, 1.0, 100.0);
    RRSample sample(0, g.node_count());
    Rng rng(7);
    extend_sample(sample, g, campaign, 100000, rng);
    std::vector<std::uint8_t> assigned(g.node_count(), 0);
    std::vector<double> costs(g.node_count(), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_best_ca_node(sample, assigned));
        benchmark::DoNotOptimize(select_best_cs_node(sample, costs, assigned));
    }
}
BENCHMARK(bm_selection_scan);

void bm_mc_spread(benchmark::State& state) {
    const Graph g = benchmark_graph(1000, 5000);
    const AdCampaign campaign(0, {1.0}, 1.0, 100.0);
    const std::vector<NodeId> seeds{1, 2, 3};
    Rng rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            mc_spread(g, campaign, seeds, static_cast<std::uint64_t>(state.range(0)), rng).value);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_mc_spread)->Arg(1000)->Arg(10000);

} // namespace
