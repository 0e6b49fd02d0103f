#include "revmax/tic.hpp"

#include <algorithm>
#include <numeric>

#include "revmax/parallel.hpp"

namespace revmax {

namespace {

constexpr std::uint64_t kMcChunk = 8192;

/// Forward cascade in a lazily sampled world; each out-arc of an activated
/// node is flipped exactly once. Returns the activated-node count.
std::uint64_t simulate_once(const Graph& graph, std::span<const double> probs,
                            std::span<const NodeId> seeds, Rng& rng,
                            std::vector<NodeId>& queue, std::vector<std::uint8_t>& active) {
    queue.clear();
    std::fill(active.begin(), active.end(), 0);
    for (NodeId s : seeds) {
        if (!active[s]) {
            active[s] = 1;
            queue.push_back(s);
        }
    }
    std::size_t head = 0;
    while (head < queue.size()) {
        const NodeId u = queue[head++];
        for (ArcId a : graph.out_arcs(u)) {
            const NodeId v = graph.arc(a).target;
            if (active[v]) {
                continue;
            }
            if (rng.next_double() < probs[a]) {
                active[v] = 1;
                queue.push_back(v);
            }
        }
    }
    return queue.size();
}

std::size_t unique_seed_count(const Graph& graph, std::span<const NodeId> seeds) {
    std::vector<std::uint8_t> seen(graph.node_count(), 0);
    std::size_t count = 0;
    for (NodeId s : seeds) {
        if (s >= graph.node_count()) {
            throw std::invalid_argument("seed node out of range");
        }
        if (!seen[s]) {
            seen[s] = 1;
            ++count;
        }
    }
    return count;
}

} // namespace

std::size_t PossibleWorld::live_count() const {
    return static_cast<std::size_t>(std::count(live.begin(), live.end(), 1));
}

std::vector<NodeId> PossibleWorld::reachable_from(std::span<const NodeId> seeds) const {
    std::vector<std::uint8_t> active(graph->node_count(), 0);
    std::vector<NodeId> queue;
    for (NodeId s : seeds) {
        if (!active[s]) {
            active[s] = 1;
            queue.push_back(s);
        }
    }
    std::size_t head = 0;
    while (head < queue.size()) {
        const NodeId u = queue[head++];
        for (ArcId a : graph->out_arcs(u)) {
            const NodeId v = graph->arc(a).target;
            if (live[a] && !active[v]) {
                active[v] = 1;
                queue.push_back(v);
            }
        }
    }
    std::sort(queue.begin(), queue.end());
    return queue;
}

PossibleWorld sample_possible_world(const Graph& graph, const AdCampaign& campaign, Rng& rng) {
    const auto probs = resolve_probabilities(graph, campaign);
    PossibleWorld world;
    world.graph = &graph;
    world.live.resize(graph.arc_count());
    for (ArcId a = 0; a < graph.arc_count(); ++a) {
        world.live[a] = rng.bernoulli(probs[a]) ? 1 : 0;
    }
    return world;
}

SpreadEstimate mc_spread_resolved(const Graph& graph, std::span<const double> arc_probabilities,
                                  std::span<const NodeId> seeds, std::uint64_t runs, Rng& rng) {
    if (runs == 0) {
        throw std::invalid_argument("mc_spread: runs must be at least 1");
    }
    SpreadEstimate est;
    est.method = SpreadMethod::monte_carlo;
    est.runs = runs;
    est.seed_count = unique_seed_count(graph, seeds);
    if (est.seed_count == 0) {
        return est;
    }

    const std::uint64_t base = rng.next_u64();
    const std::uint64_t chunks = (runs + kMcChunk - 1) / kMcChunk;
    std::vector<std::uint64_t> chunk_sums(chunks, 0);
    parallel_for_chunks(runs, kMcChunk, [&](std::uint64_t c, std::uint64_t begin, std::uint64_t end) {
        Rng stream = Rng::stream(base, {c});
        std::vector<NodeId> queue;
        std::vector<std::uint8_t> active(graph.node_count(), 0);
        std::uint64_t sum = 0;
        for (std::uint64_t r = begin; r < end; ++r) {
            sum += simulate_once(graph, arc_probabilities, seeds, stream, queue, active);
        }
        chunk_sums[c] = sum;
    });

    std::uint64_t total = 0;
    for (std::uint64_t s : chunk_sums) {
        total += s;
    }
    est.value = static_cast<double>(total) / static_cast<double>(runs);
    return est;
}

SpreadEstimate mc_spread(const Graph& graph, const AdCampaign& campaign,
                         std::span<const NodeId> seeds, std::uint64_t runs, Rng& rng) {
    const auto probs = resolve_probabilities(graph, campaign);
    return mc_spread_resolved(graph, probs, seeds, runs, rng);
}

namespace {

/// DFS over arc decisions. Arcs enter `pending` when their source is
/// reached; an arc whose target is already reached is skipped (its state
/// cannot change the outcome, so it integrates out).
class ExactEnumerator {
public:
    ExactEnumerator(const Graph& graph, std::span<const double> probs)
        : graph_(graph), probs_(probs), reached_(graph.node_count(), 0) {}

    double run(std::span<const NodeId> seeds) {
        expected_ = 0.0;
        pending_.clear();
        std::fill(reached_.begin(), reached_.end(), 0);
        std::size_t count = 0;
        for (NodeId s : seeds) {
            if (!reached_[s]) {
                reached_[s] = 1;
                ++count;
                append_out_arcs(s);
            }
        }
        if (count == 0) {
            return 0.0;
        }
        descend(0, 1.0, count);
        return expected_;
    }

private:
    void append_out_arcs(NodeId u) {
        for (ArcId a : graph_.out_arcs(u)) {
            pending_.push_back(a);
        }
    }

    void descend(std::size_t index, double prob, std::size_t count) {
        while (index < pending_.size() && reached_[graph_.arc(pending_[index]).target]) {
            ++index;
        }
        if (index == pending_.size()) {
            expected_ += prob * static_cast<double>(count);
            return;
        }
        const ArcId a = pending_[index];
        const NodeId v = graph_.arc(a).target;
        const double p = probs_[a];
        if (p < 1.0) {
            descend(index + 1, prob * (1.0 - p), count);
        }
        if (p > 0.0) {
            const std::size_t saved = pending_.size();
            reached_[v] = 1;
            append_out_arcs(v);
            descend(index + 1, prob * p, count + 1);
            reached_[v] = 0;
            pending_.resize(saved);
        }
    }

    const Graph& graph_;
    std::span<const double> probs_;
    std::vector<std::uint8_t> reached_;
    std::vector<ArcId> pending_;
    double expected_ = 0.0;
};

} // namespace

double exact_spread_resolved(const Graph& graph, std::span<const double> arc_probabilities,
                             std::span<const NodeId> seeds) {
    if (graph.arc_count() > kExactSpreadArcLimit) {
        throw std::runtime_error("exact_spread: graph has " + std::to_string(graph.arc_count()) +
                                 " arcs, beyond the enumeration budget of " +
                                 std::to_string(kExactSpreadArcLimit) + "; use mc_spread");
    }
    ExactEnumerator e(graph, arc_probabilities);
    return e.run(seeds);
}

SpreadEstimate exact_spread(const Graph& graph, const AdCampaign& campaign,
                            std::span<const NodeId> seeds) {
    SpreadEstimate est;
    est.method = SpreadMethod::exact;
    est.seed_count = unique_seed_count(graph, seeds);
    const auto probs = resolve_probabilities(graph, campaign);
    est.value = exact_spread_resolved(graph, probs, seeds);
    return est;
}

double SpreadOracle::spread(const Graph& graph, const AdCampaign& campaign,
                            std::span<const NodeId> seeds, std::uint64_t key1,
                            std::uint64_t key2) const {
    const auto probs = resolve_probabilities(graph, campaign);
    return spread_resolved(graph, probs, campaign, seeds, key1, key2);
}

double SpreadOracle::spread_resolved(const Graph& graph, std::span<const double> arc_probabilities,
                                     const AdCampaign& campaign, std::span<const NodeId> seeds,
                                     std::uint64_t key1, std::uint64_t key2) const {
    if (kind == Kind::exact) {
        return exact_spread_resolved(graph, arc_probabilities, seeds);
    }
    Rng rng = Rng::stream(seed, {campaign.id, key1, key2});
    return mc_spread_resolved(graph, arc_probabilities, seeds, runs, rng).value;
}

} // namespace revmax
