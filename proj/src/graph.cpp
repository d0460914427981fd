#include "hiercoref/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>

namespace hiercoref {

namespace {

std::vector<std::vector<int>> adjacency(int n, const EdgeList& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : edges) adj[u].push_back(v);
  return adj;
}

// Topological order via Kahn's algorithm; empty result means a cycle.
std::vector<int> topo_order(int n, const EdgeList& edges) {
  std::vector<int> indeg(n, 0);
  auto adj = adjacency(n, edges);
  for (const auto& [u, v] : edges) {
    (void)u;
    ++indeg[v];
  }
  std::deque<int> ready;
  for (int v = 0; v < n; ++v) {
    if (indeg[v] == 0) ready.push_back(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (int w : adj[v]) {
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  if (static_cast<int>(order.size()) != n) order.clear();
  return order;
}

}  // namespace

bool is_acyclic(int node_count, const EdgeList& edges) {
  if (node_count == 0) return true;
  return !topo_order(node_count, edges).empty();
}

EdgeList closure_edges(int node_count, const EdgeList& edges) {
  if (!is_acyclic(node_count, edges)) {
    throw ValidationError("transitive closure: graph contains a cycle");
  }
  auto adj = adjacency(node_count, edges);
  EdgeList out;
  std::vector<char> seen(node_count, 0);
  for (int src = 0; src < node_count; ++src) {
    std::fill(seen.begin(), seen.end(), 0);
    std::deque<int> queue{src};
    seen[src] = 1;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    for (int v = 0; v < node_count; ++v) {
      if (seen[v] && v != src) out.emplace_back(src, v);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

EdgeList reduction_edges(int node_count, const EdgeList& edges) {
  if (!is_acyclic(node_count, edges)) {
    throw ValidationError("transitive reduction: graph contains a cycle");
  }
  EdgeList unique = edges;
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  auto adj = adjacency(node_count, unique);
  EdgeList kept;
  std::vector<char> seen(node_count, 0);
  for (const auto& edge : unique) {
    // Redundant iff the target stays reachable without this edge.
    std::fill(seen.begin(), seen.end(), 0);
    std::deque<int> queue{edge.first};
    seen[edge.first] = 1;
    bool reachable = false;
    while (!queue.empty() && !reachable) {
      int v = queue.front();
      queue.pop_front();
      for (int w : adj[v]) {
        if (v == edge.first && w == edge.second) continue;
        if (w == edge.second) {
          reachable = true;
          break;
        }
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    if (!reachable) kept.push_back(edge);
  }
  return kept;
}

ClusterGraph transitive_closure(const ClusterGraph& g) {
  ClusterGraph out;
  out.clusters = g.clusters;
  out.edges = closure_edges(static_cast<int>(g.clusters.size()), g.edges);
  return out;
}

std::vector<std::vector<int>> weak_components(int node_count,
                                              const EdgeList& edges) {
  std::vector<int> parent(node_count);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (const auto& [u, v] : edges) parent[find(u)] = find(v);

  std::vector<std::vector<int>> groups(node_count);
  for (int v = 0; v < node_count; ++v) groups[find(v)].push_back(v);
  std::vector<std::vector<int>> components;
  for (auto& g : groups) {
    if (!g.empty()) components.push_back(std::move(g));
  }
  return components;
}

int longest_path_nodes(const std::vector<int>& nodes, const EdgeList& edges) {
  if (nodes.empty()) return 0;
  std::vector<char> in_set(1 + *std::max_element(nodes.begin(), nodes.end()), 0);
  for (int v : nodes) in_set[v] = 1;
  int max_node = static_cast<int>(in_set.size());

  EdgeList local;
  for (const auto& [u, v] : edges) {
    if (u < max_node && v < max_node && in_set[u] && in_set[v]) {
      local.emplace_back(u, v);
    }
  }
  auto order = topo_order(max_node, local);
  if (order.empty()) {
    throw ValidationError("longest path: graph contains a cycle");
  }
  std::vector<int> depth(max_node, 0);
  for (int v : order) {
    if (v < static_cast<int>(in_set.size()) && in_set[v] && depth[v] == 0) {
      depth[v] = 1;
    }
  }
  auto adj = adjacency(max_node, local);
  int best = 1;
  for (int v : order) {
    if (depth[v] == 0) continue;
    for (int w : adj[v]) {
      depth[w] = std::max(depth[w], depth[v] + 1);
      best = std::max(best, depth[w]);
    }
  }
  return best;
}

TopicGraphStats topic_graph_stats(const ClusterGraph& g) {
  const int n = static_cast<int>(g.clusters.size());
  TopicGraphStats stats;
  if (n == 0) return stats;
  auto components = weak_components(n, g.edges);
  stats.components = static_cast<int>(components.size());
  std::size_t largest = 0;
  for (const auto& c : components) largest = std::max(largest, c.size());
  for (const auto& c : components) {
    if (c.size() == largest) {
      stats.max_component_depth =
          std::max(stats.max_component_depth, longest_path_nodes(c, g.edges));
    }
  }
  return stats;
}

DatasetStats dataset_stats(const std::vector<Topic>& topics) {
  DatasetStats s;
  s.topics = topics.size();
  double comp_sum = 0.0, depth_sum = 0.0;
  for (const auto& t : topics) {
    if (!t.gold) {
      throw ValidationError("topic " + t.topic_id + ": no gold graph");
    }
    s.documents += t.documents.size();
    s.mentions += t.mentions.size();
    s.clusters += t.gold->clusters.size();
    s.relations += t.gold->edges.size();
    auto g = topic_graph_stats(*t.gold);
    comp_sum += g.components;
    depth_sum += g.max_component_depth;
  }
  if (!topics.empty()) {
    s.mean_components = comp_sum / static_cast<double>(topics.size());
    s.mean_max_depth = depth_sum / static_cast<double>(topics.size());
  }
  return s;
}

}  // namespace hiercoref
