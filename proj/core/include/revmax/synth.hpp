#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "revmax/graph.hpp"
#include "revmax/rng.hpp"

namespace revmax {

enum class SynthKind { star, chain, random_directed, two_community };

std::string_view synth_kind_name(SynthKind kind);
std::optional<SynthKind> synth_kind_from_name(std::string_view name);

struct SynthParams {
    NodeId nodes = 0;                // star: leaf count; chain/random: node count
    std::uint64_t arcs = 0;          // random_directed: exact arc count
    NodeId nodes_b = 0;              // two_community: second block size
    double p_in = 0.1;               // two_community: intra-community arc probability
    double p_out = 0.01;             // two_community: cross-community arc probability
    double probability = 0.1;        // influence probability written on each arc
    bool weighted_cascade = false;   // replace probabilities by 1/in_degree
};

/// Single-topic synthetic graphs for desk-scale experiments.
Graph synth_graph(SynthKind kind, const SynthParams& params, Rng& rng);

/// Builds and writes the graph in edge-list format.
void synth_graph_file(const std::filesystem::path& path, SynthKind kind,
                      const SynthParams& params, Rng& rng);

} // namespace revmax
