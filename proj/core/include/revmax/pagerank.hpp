#pragma once

#include <span>
#include <vector>

#include "revmax/graph.hpp"

namespace revmax {

struct PageRankOptions {
    double damping = 0.85;
    double tolerance = 1e-12; // L1 residual
    std::uint64_t max_iterations = 1000000;
};

/// Power-iteration PageRank on arc weights given by the ad-specific
/// probabilities, normalized per source node. Nodes with zero outgoing
/// weight distribute their rank uniformly.
std::vector<double> pagerank(const Graph& graph, std::span<const double> arc_probabilities,
                             const PageRankOptions& options = {});

/// Node ids by descending score; ties to the lowest id.
std::vector<NodeId> ranking_from_scores(std::span<const double> scores);

} // namespace revmax
