#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hiercoref/model.hpp"

namespace hiercoref {

using EdgeList = std::vector<std::pair<int, int>>;

bool is_acyclic(int node_count, const EdgeList& edges);

// Reachability relation of a DAG (all pairs u -> v with a directed path,
// u != v), sorted and deduplicated. Throws ValidationError on a cycle.
EdgeList closure_edges(int node_count, const EdgeList& edges);

// Minimal edge set with the same reachability: drops every edge that is
// implied by a longer path. Throws ValidationError on a cycle.
EdgeList reduction_edges(int node_count, const EdgeList& edges);

// Same clusters, edge set replaced by the reachability relation.
ClusterGraph transitive_closure(const ClusterGraph& g);

// Connected components treating edges as undirected; isolated nodes are
// size-1 components.
std::vector<std::vector<int>> weak_components(int node_count,
                                              const EdgeList& edges);

// Longest directed path measured in nodes, restricted to `nodes`
// (a single node counts as 1). Requires acyclic input.
int longest_path_nodes(const std::vector<int>& nodes, const EdgeList& edges);

struct TopicGraphStats {
  int components = 0;
  int max_component_depth = 0;  // depth of the largest weak component
};

TopicGraphStats topic_graph_stats(const ClusterGraph& g);

struct DatasetStats {
  std::size_t topics = 0;
  std::size_t documents = 0;
  std::size_t mentions = 0;
  std::size_t clusters = 0;
  std::size_t relations = 0;
  double mean_components = 0.0;
  double mean_max_depth = 0.0;
};

// Counts plus per-topic graph shape averages. Every topic must carry a
// gold graph.
DatasetStats dataset_stats(const std::vector<Topic>& topics);

}  // namespace hiercoref
