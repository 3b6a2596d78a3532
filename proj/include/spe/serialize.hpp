#pragma once

#include <string>

#include "spe/graph.hpp"

namespace spe {

// JSON-shaped text format with an explicit node table and id references so
// shared subgraphs persist as shared. Infinite bounds use "inf"/"-inf".
std::string save_graph(const Graph& g, NodeId root);

struct LoadedGraph {
  Graph graph{true};
  NodeId root = -1;
};

LoadedGraph load_graph(const std::string& text);

// Atomic file write (write to a temporary, then rename).
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Element serializers shared by the graph format.
std::string outcomes_to_json_text(const Outcomes& v);
Outcomes outcomes_from_json_text(const std::string& text);

}  // namespace spe
