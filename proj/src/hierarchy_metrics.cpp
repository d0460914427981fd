#include "hiercoref/hierarchy_metrics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace hiercoref {

EvalGraph eval_graph(const Topic& topic, const ClusterGraph& g) {
  EvalGraph out;
  out.clusters = clustering_from_graph(topic, g);
  out.edges = g.edges;
  return out;
}

namespace {

std::map<MentionKey, int> membership(const Clustering& clusters) {
  std::map<MentionKey, int> where;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (const auto& m : clusters[i]) where[m] = static_cast<int>(i);
  }
  return where;
}

// Shortest directed distance (edge count) from every cluster to every other;
// -1 when unreachable.
std::vector<std::vector<int>> directed_distances(int n, const EdgeList& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : edges) adj[u].push_back(v);
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (int src = 0; src < n; ++src) {
    dist[src][src] = 0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int w : adj[v]) {
        if (dist[src][w] < 0) {
          dist[src][w] = dist[src][v] + 1;
          queue.push_back(w);
        }
      }
    }
  }
  return dist;
}

// Symmetric chain distance between clusters: 0 inside a cluster, otherwise
// the shortest pure ancestor/descendant chain; -1 for none (siblings).
int chain_distance(const std::vector<std::vector<int>>& dist, int a, int b) {
  if (a == b) return 0;
  int forward = dist[a][b];
  int backward = dist[b][a];
  if (forward < 0) return backward;
  if (backward < 0) return forward;
  return std::min(forward, backward);
}

}  // namespace

std::vector<HierarchyMatch> hierarchy_matches(const EvalGraph& source,
                                              const EvalGraph& reference,
                                              Overlap overlap) {
  const int ns = static_cast<int>(source.clusters.size());
  const int nr = static_cast<int>(reference.clusters.size());
  EdgeList source_closed = closure_edges(ns, source.edges);
  EdgeList reference_closed = closure_edges(nr, reference.edges);

  auto ref_cluster = membership(reference.clusters);
  std::set<std::pair<int, int>> ref_edges(reference_closed.begin(),
                                          reference_closed.end());

  std::vector<HierarchyMatch> matches;
  matches.reserve(source_closed.size());
  for (const auto& edge : source_closed) {
    const auto& parents = source.clusters[edge.first];
    const auto& children = source.clusters[edge.second];
    HierarchyMatch match;
    match.edge = edge;
    std::size_t hits = 0;
    for (const auto& p : parents) {
      auto pit = ref_cluster.find(p);
      if (pit == ref_cluster.end()) continue;
      for (const auto& c : children) {
        auto cit = ref_cluster.find(c);
        if (cit == ref_cluster.end()) continue;
        if (ref_edges.count({pit->second, cit->second})) {
          ++hits;
          if (!match.witness) match.witness = std::make_pair(p, c);
          if (overlap == Overlap::kAnyPair) break;
        }
      }
      if (overlap == Overlap::kAnyPair && match.witness) break;
    }
    if (overlap == Overlap::kAnyPair) {
      match.matched = hits > 0;
    } else {
      match.matched = 2 * hits >= parents.size() * children.size();
    }
    if (!match.matched) match.witness.reset();
    matches.push_back(std::move(match));
  }
  return matches;
}

MetricResult hierarchy_score(const EvalGraph& gold, const EvalGraph& sys,
                             Overlap overlap) {
  auto precision_side = hierarchy_matches(sys, gold, overlap);
  auto recall_side = hierarchy_matches(gold, sys, overlap);

  MetricResult result;
  result.counts.precision_den = static_cast<double>(precision_side.size());
  result.counts.recall_den = static_cast<double>(recall_side.size());
  for (const auto& m : precision_side) {
    if (m.matched) result.counts.precision_num += 1.0;
  }
  for (const auto& m : recall_side) {
    if (m.matched) result.counts.recall_num += 1.0;
  }

  if (precision_side.empty() && recall_side.empty()) {
    result.prf = PRF{1.0, 1.0, 1.0};  // nothing to hierarchize on either side
  } else if (precision_side.empty()) {
    result.prf = PRF{0.0, 1.0, 0.0};
  } else if (recall_side.empty()) {
    result.prf = PRF{1.0, 0.0, 0.0};
  } else {
    result.prf = PRF::from(
        result.counts.recall_num / result.counts.recall_den,
        result.counts.precision_num / result.counts.precision_den);
  }
  return result;
}

std::optional<int> cluster_distance(const EvalGraph& g, const MentionKey& m1,
                                    const MentionKey& m2) {
  auto where = membership(g.clusters);
  auto it1 = where.find(m1);
  auto it2 = where.find(m2);
  if (it1 == where.end() || it2 == where.end()) {
    throw ValidationError("cluster_distance: mention (" +
                          (it1 == where.end() ? m1.doc_id : m2.doc_id) +
                          ") is not clustered");
  }
  auto dist =
      directed_distances(static_cast<int>(g.clusters.size()), g.edges);
  int d = chain_distance(dist, it1->second, it2->second);
  if (d < 0) return std::nullopt;
  return d;
}

PathScore path_distance_score(const EvalGraph& gold, const EvalGraph& sys,
                              bool closed_paths) {
  const int ng = static_cast<int>(gold.clusters.size());
  const int ns = static_cast<int>(sys.clusters.size());
  EdgeList gold_edges =
      closed_paths ? closure_edges(ng, gold.edges) : gold.edges;
  EdgeList sys_edges = closed_paths ? closure_edges(ns, sys.edges) : sys.edges;
  if (!is_acyclic(ng, gold.edges) || !is_acyclic(ns, sys.edges)) {
    throw ValidationError("path_distance_score: graph contains a cycle");
  }

  auto gold_where = membership(gold.clusters);
  auto sys_where = membership(sys.clusters);
  auto gold_dist = directed_distances(ng, gold_edges);
  auto sys_dist = directed_distances(ns, sys_edges);

  std::vector<MentionKey> universe;
  for (const auto& [key, idx] : gold_where) {
    (void)idx;
    universe.push_back(key);
  }
  for (const auto& [key, idx] : sys_where) {
    (void)idx;
    if (!gold_where.count(key)) universe.push_back(key);
  }
  std::sort(universe.begin(), universe.end());

  PathScore score;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    auto g1 = gold_where.find(universe[i]);
    auto s1 = sys_where.find(universe[i]);
    for (std::size_t j = i + 1; j < universe.size(); ++j) {
      auto g2 = gold_where.find(universe[j]);
      auto s2 = sys_where.find(universe[j]);
      int dg = (g1 != gold_where.end() && g2 != gold_where.end())
                   ? chain_distance(gold_dist, g1->second, g2->second)
                   : -1;
      int ds = (s1 != sys_where.end() && s2 != sys_where.end())
                   ? chain_distance(sys_dist, s1->second, s2->second)
                   : -1;
      if (dg < 0 && ds < 0) continue;  // disconnected in both: ignored
      ++score.pair_count;
      if (dg >= 0 && ds >= 0) {
        score.ratio_sum += (static_cast<double>(std::min(dg, ds)) + 1.0) /
                           (static_cast<double>(std::max(dg, ds)) + 1.0);
      }  // one-sided connection contributes zero
    }
  }
  score.score = score.pair_count > 0
                    ? score.ratio_sum / static_cast<double>(score.pair_count)
                    : 1.0;
  return score;
}

}  // namespace hiercoref
