#include "revmax/graph_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>

namespace revmax {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        if (i > start) {
            fields.push_back(line.substr(start, i - start));
        }
    }
    return fields;
}

double parse_probability(std::string_view token, std::size_t line_no) {
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
        throw ParseError("cannot parse probability '" + std::string(token) + "'", line_no);
    }
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ParseError("probability " + std::string(token) + " outside [0,1]", line_no);
    }
    return value;
}

} // namespace

Graph parse_edge_list(std::istream& in) {
    std::vector<Arc> arcs;
    std::vector<double> probs;
    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeId> index;
    std::size_t topics = 0; // 0: not yet known

    auto intern = [&](std::string_view token) -> NodeId {
        auto it = index.find(std::string(token));
        if (it != index.end()) {
            return it->second;
        }
        const NodeId id = static_cast<NodeId>(labels.size());
        labels.emplace_back(token);
        index.emplace(labels.back(), id);
        return id;
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::string_view view(line);
        if (view.empty()) {
            continue;
        }
        if (view[0] == '#') {
            const auto fields = split_fields(view.substr(1));
            if (fields.size() == 2 && fields[0] == "topics") {
                std::size_t declared = 0;
                const auto res = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), declared);
                if (res.ec != std::errc{} || declared == 0) {
                    throw ParseError("invalid #topics header", line_no);
                }
                if (topics != 0 && topics != declared) {
                    throw ParseError("#topics header conflicts with earlier arcs", line_no);
                }
                topics = declared;
            }
            continue;
        }
        const auto fields = split_fields(view);
        if (fields.size() < 3) {
            throw ParseError("expected `source target p_1 ... p_L`", line_no);
        }
        const std::size_t line_topics = fields.size() - 2;
        if (topics == 0) {
            topics = line_topics;
        } else if (line_topics != topics) {
            throw ParseError("arc has " + std::to_string(line_topics) + " topic probabilities, expected " +
                                 std::to_string(topics),
                             line_no);
        }
        const NodeId src = intern(fields[0]);
        const NodeId dst = intern(fields[1]);
        if (src == dst) {
            throw ParseError("self-loop on node '" + std::string(fields[0]) + "'", line_no);
        }
        arcs.push_back({src, dst});
        for (std::size_t z = 0; z < topics; ++z) {
            probs.push_back(parse_probability(fields[2 + z], line_no));
        }
    }

    if (topics == 0) {
        topics = 1;
    }
    const NodeId node_count = static_cast<NodeId>(labels.size());
    return Graph::from_arcs(node_count, std::move(arcs), std::move(probs), topics,
                            std::move(labels));
}

Graph load_graph(const std::filesystem::path& path, GraphFormat format) {
    if (format != GraphFormat::edge_list) {
        throw std::invalid_argument("load_graph: unknown format");
    }
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_graph: cannot open " + path.string());
    }
    return parse_edge_list(in);
}

void write_edge_list(const Graph& graph, std::ostream& out) {
    out << "#topics " << graph.topic_count() << "\n";
    char buf[64];
    for (ArcId a = 0; a < graph.arc_count(); ++a) {
        const Arc& arc = graph.arc(a);
        out << graph.label(arc.source) << '\t' << graph.label(arc.target);
        for (double p : graph.arc_probabilities(a)) {
            std::snprintf(buf, sizeof(buf), "%.17g", p);
            out << '\t' << buf;
        }
        out << '\n';
    }
}

void save_graph(const Graph& graph, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_graph: cannot open " + path.string());
    }
    write_edge_list(graph, out);
}

} // namespace revmax
