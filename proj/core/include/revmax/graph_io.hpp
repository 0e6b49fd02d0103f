#pragma once

#include <filesystem>
#include <iosfwd>

#include "revmax/graph.hpp"

namespace revmax {

enum class GraphFormat { edge_list };

/// Reads an edge-list file: one arc per line,
/// `source target p_1 ... p_L` separated by tabs or spaces. An optional
/// `#topics L` header pins L; otherwise L is inferred from the first data
/// line. Other lines starting with `#` are comments. Node ids are arbitrary
/// tokens, compacted to 0..n-1 in first-appearance order (labels retained).
Graph load_graph(const std::filesystem::path& path, GraphFormat format = GraphFormat::edge_list);

Graph parse_edge_list(std::istream& in);

void save_graph(const Graph& graph, const std::filesystem::path& path);
void write_edge_list(const Graph& graph, std::ostream& out);

} // namespace revmax
