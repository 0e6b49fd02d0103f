#include "revmax/synth.hpp"

#include <unordered_set>

#include "revmax/graph_io.hpp"

namespace revmax {

std::string_view synth_kind_name(SynthKind kind) {
    switch (kind) {
    case SynthKind::star:
        return "star";
    case SynthKind::chain:
        return "chain";
    case SynthKind::random_directed:
        return "random-directed";
    case SynthKind::two_community:
        return "two-community";
    }
    return "unknown";
}

std::optional<SynthKind> synth_kind_from_name(std::string_view name) {
    for (SynthKind k : {SynthKind::star, SynthKind::chain, SynthKind::random_directed,
                        SynthKind::two_community}) {
        if (synth_kind_name(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

Graph synth_graph(SynthKind kind, const SynthParams& params, Rng& rng) {
    if (!(params.probability >= 0.0 && params.probability <= 1.0)) {
        throw std::invalid_argument("synth_graph: probability outside [0,1]");
    }
    std::vector<Arc> arcs;
    NodeId n = 0;
    switch (kind) {
    case SynthKind::star: {
        if (params.nodes < 1) {
            throw std::invalid_argument("synth_graph: star needs at least one leaf");
        }
        n = params.nodes + 1; // node 0 is the center
        for (NodeId leaf = 1; leaf < n; ++leaf) {
            arcs.push_back({0, leaf});
        }
        break;
    }
    case SynthKind::chain: {
        if (params.nodes < 2) {
            throw std::invalid_argument("synth_graph: chain needs at least two nodes");
        }
        n = params.nodes;
        for (NodeId u = 0; u + 1 < n; ++u) {
            arcs.push_back({u, u + 1});
        }
        break;
    }
    case SynthKind::random_directed: {
        n = params.nodes;
        if (n < 2) {
            throw std::invalid_argument("synth_graph: random-directed needs at least two nodes");
        }
        const std::uint64_t possible = static_cast<std::uint64_t>(n) * (n - 1);
        if (params.arcs > possible) {
            throw std::invalid_argument("synth_graph: more arcs requested than ordered pairs");
        }
        std::unordered_set<std::uint64_t> chosen;
        chosen.reserve(params.arcs * 2);
        while (chosen.size() < params.arcs) {
            const NodeId u = rng.next_below(n);
            const NodeId v = rng.next_below(n);
            if (u == v) {
                continue;
            }
            const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
            if (chosen.insert(key).second) {
                arcs.push_back({u, v});
            }
        }
        break;
    }
    case SynthKind::two_community: {
        if (params.nodes < 1 || params.nodes_b < 1) {
            throw std::invalid_argument("synth_graph: both communities need at least one node");
        }
        if (!(params.p_in >= 0.0 && params.p_in <= 1.0) ||
            !(params.p_out >= 0.0 && params.p_out <= 1.0)) {
            throw std::invalid_argument("synth_graph: community probabilities outside [0,1]");
        }
        n = params.nodes + params.nodes_b;
        auto community = [&](NodeId u) { return u < params.nodes ? 0 : 1; };
        for (NodeId u = 0; u < n; ++u) {
            for (NodeId v = 0; v < n; ++v) {
                if (u == v) {
                    continue;
                }
                const double p = community(u) == community(v) ? params.p_in : params.p_out;
                if (rng.bernoulli(p)) {
                    arcs.push_back({u, v});
                }
            }
        }
        break;
    }
    }
    std::vector<double> probs(arcs.size(), params.probability);
    Graph g = Graph::from_arcs(n, std::move(arcs), std::move(probs), 1);
    if (params.weighted_cascade) {
        g = weighted_cascade_probabilities(g);
    }
    return g;
}

void synth_graph_file(const std::filesystem::path& path, SynthKind kind,
                      const SynthParams& params, Rng& rng) {
    save_graph(synth_graph(kind, params, rng), path);
}

} // namespace revmax
