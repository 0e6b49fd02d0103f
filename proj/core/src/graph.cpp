#include "revmax/graph.hpp"

#include <algorithm>
#include <unordered_set>

namespace revmax {

Graph::Graph() : out_offsets_(1, 0), in_offsets_(1, 0) {}

Graph Graph::from_arcs(NodeId node_count, std::vector<Arc> arcs,
                       std::vector<double> topic_probabilities, std::size_t topics,
                       std::vector<std::string> labels) {
    if (topics == 0) {
        throw std::invalid_argument("graph: topic count must be at least 1");
    }
    if (topic_probabilities.size() != arcs.size() * topics) {
        throw std::invalid_argument("graph: probability table size does not match arcs * topics");
    }
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(arcs.size());
    for (std::size_t a = 0; a < arcs.size(); ++a) {
        const Arc& arc = arcs[a];
        if (arc.source >= node_count || arc.target >= node_count) {
            throw std::invalid_argument("graph: arc endpoint out of range");
        }
        if (arc.source == arc.target) {
            throw std::invalid_argument("graph: self-loop on node " + std::to_string(arc.source));
        }
        const std::uint64_t key =
            (static_cast<std::uint64_t>(arc.source) << 32) | arc.target;
        if (!seen.insert(key).second) {
            throw std::invalid_argument("graph: parallel arc " + std::to_string(arc.source) +
                                        " -> " + std::to_string(arc.target));
        }
        for (std::size_t z = 0; z < topics; ++z) {
            const double p = topic_probabilities[a * topics + z];
            if (!(p >= 0.0 && p <= 1.0)) {
                throw std::invalid_argument("graph: probability " + std::to_string(p) +
                                            " outside [0,1] on arc " + std::to_string(a));
            }
        }
    }

    Graph g;
    g.node_count_ = node_count;
    g.topics_ = topics;
    g.arcs_ = std::move(arcs);
    g.probs_ = std::move(topic_probabilities);
    if (labels.empty()) {
        labels.reserve(node_count);
        for (NodeId u = 0; u < node_count; ++u) {
            labels.push_back(std::to_string(u));
        }
    } else if (labels.size() != node_count) {
        throw std::invalid_argument("graph: label count does not match node count");
    }
    g.labels_ = std::move(labels);
    g.label_index_.reserve(g.labels_.size());
    for (NodeId u = 0; u < node_count; ++u) {
        g.label_index_.emplace(g.labels_[u], u);
    }
    g.build_indexes();
    return g;
}

void Graph::build_indexes() {
    out_offsets_.assign(node_count_ + 1, 0);
    in_offsets_.assign(node_count_ + 1, 0);
    for (const Arc& a : arcs_) {
        ++out_offsets_[a.source + 1];
        ++in_offsets_[a.target + 1];
    }
    for (NodeId u = 0; u < node_count_; ++u) {
        out_offsets_[u + 1] += out_offsets_[u];
        in_offsets_[u + 1] += in_offsets_[u];
    }
    out_arcs_.resize(arcs_.size());
    in_arcs_.resize(arcs_.size());
    std::vector<std::size_t> out_pos(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::size_t> in_pos(in_offsets_.begin(), in_offsets_.end() - 1);
    for (ArcId a = 0; a < arcs_.size(); ++a) {
        out_arcs_[out_pos[arcs_[a].source]++] = a;
        in_arcs_[in_pos[arcs_[a].target]++] = a;
    }
}

NodeId Graph::id_of(const std::string& label) const {
    auto it = label_index_.find(label);
    return it == label_index_.end() ? kInvalidNode : it->second;
}

Graph Graph::transposed() const {
    std::vector<Arc> rev;
    rev.reserve(arcs_.size());
    for (const Arc& a : arcs_) {
        rev.push_back({a.target, a.source});
    }
    return from_arcs(node_count_, std::move(rev), probs_, topics_, labels_);
}

double edge_probability(const Graph& graph, ArcId arc, const AdCampaign& campaign) {
    if (arc >= graph.arc_count()) {
        throw std::invalid_argument("edge_probability: arc id out of range");
    }
    if (campaign.topic_count() != graph.topic_count()) {
        throw std::invalid_argument("edge_probability: campaign has " +
                                    std::to_string(campaign.topic_count()) +
                                    " topics, graph has " + std::to_string(graph.topic_count()));
    }
    const auto p = graph.arc_probabilities(arc);
    double value = 0.0;
    for (std::size_t z = 0; z < p.size(); ++z) {
        value += campaign.gamma[z] * p[z];
    }
    return value;
}

std::vector<double> resolve_probabilities(const Graph& graph, const AdCampaign& campaign) {
    if (campaign.topic_count() != graph.topic_count()) {
        throw std::invalid_argument("resolve_probabilities: topic dimension mismatch");
    }
    std::vector<double> out(graph.arc_count());
    for (ArcId a = 0; a < graph.arc_count(); ++a) {
        const auto p = graph.arc_probabilities(a);
        double value = 0.0;
        for (std::size_t z = 0; z < p.size(); ++z) {
            value += campaign.gamma[z] * p[z];
        }
        out[a] = value;
    }
    return out;
}

Graph weighted_cascade_probabilities(const Graph& graph) {
    if (graph.topic_count() != 1) {
        throw std::runtime_error("weighted_cascade_probabilities: requires a single-topic graph");
    }
    std::vector<Arc> arcs;
    arcs.reserve(graph.arc_count());
    std::vector<double> probs(graph.arc_count());
    for (ArcId a = 0; a < graph.arc_count(); ++a) {
        arcs.push_back(graph.arc(a));
        probs[a] = 1.0 / static_cast<double>(graph.in_degree(graph.arc(a).target));
    }
    return Graph::from_arcs(graph.node_count(), std::move(arcs), std::move(probs), 1,
                            graph.labels());
}

} // namespace revmax
