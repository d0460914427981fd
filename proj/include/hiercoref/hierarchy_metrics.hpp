#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "hiercoref/coref_metrics.hpp"
#include "hiercoref/graph.hpp"
#include "hiercoref/model.hpp"

namespace hiercoref {

// Identity-level view of a cluster graph: clusters of mention keys plus
// parent->child index edges. Gold and system sides are only comparable in
// this form.
struct EvalGraph {
  Clustering clusters;
  EdgeList edges;
};

EvalGraph eval_graph(const Topic& topic, const ClusterGraph& g);

enum class Overlap { kAnyPair, kHalf };

// One closed system (or gold) edge and whether a gold (or system)
// parent-child mention pair backs it.
struct HierarchyMatch {
  std::pair<int, int> edge;
  bool matched = false;
  std::optional<std::pair<MentionKey, MentionKey>> witness;
};

// Matches of `source`'s closed edges against `reference`'s closed hierarchy.
// With Overlap::kHalf a match needs witness pairs covering at least half of
// the cluster-pair product; the stored witness is the first pair found.
std::vector<HierarchyMatch> hierarchy_matches(const EvalGraph& source,
                                              const EvalGraph& reference,
                                              Overlap overlap);

// Cluster-level hierarchy score. Precision counts closed system edges backed
// by a closed gold parent-child mention pair; recall swaps the roles.
// No closed edges on either side scores 1.0.
MetricResult hierarchy_score(const EvalGraph& gold, const EvalGraph& sys,
                             Overlap overlap);

// Directed-edge count between the clusters of two mentions: 0 inside one
// cluster, otherwise the shortest single-direction chain over the direct
// edge set; empty when no such chain exists (e.g. siblings). Symmetric.
// Throws ValidationError if a mention is unclustered.
std::optional<int> cluster_distance(const EvalGraph& g, const MentionKey& m1,
                                    const MentionKey& m2);

struct PathScore {
  double score = 1.0;      // mean ratio; 1.0 when no pair is connected
  double ratio_sum = 0.0;  // poolable pieces for micro averaging
  std::size_t pair_count = 0;
};

// Mean over mention pairs connected in gold or system of
// (min distance + 1) / (max distance + 1); one-sided connections count 0.
// `closed_paths` switches distances to the transitive closure.
PathScore path_distance_score(const EvalGraph& gold, const EvalGraph& sys,
                              bool closed_paths = false);

}  // namespace hiercoref
