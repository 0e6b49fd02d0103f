#include "revmax/pagerank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace revmax {

std::vector<double> pagerank(const Graph& graph, std::span<const double> arc_probabilities,
                             const PageRankOptions& options) {
    const NodeId n = graph.node_count();
    if (n == 0) {
        return {};
    }
    std::vector<double> out_weight(n, 0.0);
    for (ArcId a = 0; a < graph.arc_count(); ++a) {
        out_weight[graph.arc(a).source] += arc_probabilities[a];
    }

    const double uniform = 1.0 / static_cast<double>(n);
    std::vector<double> rank(n, uniform);
    std::vector<double> next(n, 0.0);

    for (std::uint64_t it = 0; it < options.max_iterations; ++it) {
        double dangling = 0.0;
        for (NodeId u = 0; u < n; ++u) {
            if (out_weight[u] <= 0.0) {
                dangling += rank[u];
            }
        }
        const double base = (1.0 - options.damping) * uniform +
                            options.damping * dangling * uniform;
        std::fill(next.begin(), next.end(), base);
        for (NodeId v = 0; v < n; ++v) {
            double in = 0.0;
            for (ArcId a : graph.in_arcs(v)) {
                const NodeId u = graph.arc(a).source;
                if (out_weight[u] > 0.0) {
                    in += rank[u] * arc_probabilities[a] / out_weight[u];
                }
            }
            next[v] += options.damping * in;
        }
        double residual = 0.0;
        for (NodeId u = 0; u < n; ++u) {
            residual += std::abs(next[u] - rank[u]);
        }
        rank.swap(next);
        if (residual <= options.tolerance) {
            break;
        }
    }
    return rank;
}

std::vector<NodeId> ranking_from_scores(std::span<const double> scores) {
    std::vector<NodeId> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
    });
    return order;
}

} // namespace revmax
