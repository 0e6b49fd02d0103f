#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "revmax/campaign.hpp"
#include "revmax/types.hpp"

namespace revmax {

struct Arc {
    NodeId source = kInvalidNode;
    NodeId target = kInvalidNode;
};

/// Immutable directed graph with a per-topic probability vector on every
/// arc. Nodes are dense 0-based indices; the original file labels are kept
/// for reporting. Safe to share across threads after construction.
class Graph {
public:
    Graph();

    /// Validates all invariants: probabilities in [0,1], one probability
    /// vector of length `topics` per arc, no self-loops, no parallel arcs.
    static Graph from_arcs(NodeId node_count, std::vector<Arc> arcs,
                           std::vector<double> topic_probabilities, std::size_t topics,
                           std::vector<std::string> labels = {});

    NodeId node_count() const noexcept { return node_count_; }
    ArcId arc_count() const noexcept { return static_cast<ArcId>(arcs_.size()); }
    std::size_t topic_count() const noexcept { return topics_; }

    const Arc& arc(ArcId a) const { return arcs_[a]; }

    std::span<const double> arc_probabilities(ArcId a) const {
        return {probs_.data() + static_cast<std::size_t>(a) * topics_, topics_};
    }

    std::span<const ArcId> out_arcs(NodeId u) const {
        return {out_arcs_.data() + out_offsets_[u], out_offsets_[u + 1] - out_offsets_[u]};
    }

    std::span<const ArcId> in_arcs(NodeId v) const {
        return {in_arcs_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
    }

    NodeId out_degree(NodeId u) const {
        return static_cast<NodeId>(out_offsets_[u + 1] - out_offsets_[u]);
    }

    NodeId in_degree(NodeId v) const {
        return static_cast<NodeId>(in_offsets_[v + 1] - in_offsets_[v]);
    }

    /// Original input label of a node; to_string(id) when none was recorded.
    const std::string& label(NodeId u) const { return labels_[u]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Dense id for an input label, or kInvalidNode.
    NodeId id_of(const std::string& label) const;

    /// Arc-reversed copy; probabilities follow their arcs.
    Graph transposed() const;

private:
    NodeId node_count_ = 0;
    std::size_t topics_ = 1;
    std::vector<Arc> arcs_;
    std::vector<double> probs_; // arc-major, arc_count * topics entries
    std::vector<std::size_t> out_offsets_;
    std::vector<ArcId> out_arcs_;
    std::vector<std::size_t> in_offsets_;
    std::vector<ArcId> in_arcs_;
    std::vector<std::string> labels_;
    std::unordered_map<std::string, NodeId> label_index_;

    void build_indexes();
};

/// Ad-specific arc probability: the topic-weighted average of the arc's
/// per-topic probabilities.
double edge_probability(const Graph& graph, ArcId arc, const AdCampaign& campaign);

/// All ad-specific arc probabilities at once, indexed by arc id.
std::vector<double> resolve_probabilities(const Graph& graph, const AdCampaign& campaign);

/// Copy of a single-topic graph with every arc (u,v) carrying 1/in_degree(v).
/// Throws std::runtime_error when the graph has more than one topic.
Graph weighted_cascade_probabilities(const Graph& graph);

} // namespace revmax
