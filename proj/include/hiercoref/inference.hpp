#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hiercoref/model.hpp"

namespace hiercoref {

int levenshtein(std::string_view a, std::string_view b);

// 1 - lev(fold(a), fold(b)) / max(|fold(a)|, |fold(b)|) with
// fold = lowercase + whitespace collapse. Two empty strings score 1.
double edit_similarity(std::string_view a, std::string_view b);

struct ScorerConfig {
  enum class Source { kEditDistance, kScoreTable };
  Source source = Source::kEditDistance;
  double clustering_threshold = 0.6;
  double hierarchy_threshold = 0.4;
  bool single_parent = false;      // restrict clusters to one parent
  bool stop_on_cycle = false;      // abort the greedy scan at the first
                                   // cycle-discarded candidate
};

// Mention-id clusters produced by inference within one topic. Clusters and
// their members are kept in canonical (lexicographic) order.
using IdClustering = std::vector<std::vector<std::string>>;

// Builds the coref-only edit-distance table over mention surfaces, or
// validates and passes through an ingested table (which must cover every
// pair of the topic). Throws ValidationError naming any missing pair.
ScoreTable pairwise_scores(const Topic& topic, const ScorerConfig& cfg,
                           const ScoreTable* table = nullptr);

// Average-linkage agglomerative clustering: merge the highest-average pair
// until the best average drops below `threshold`. Ties break on higher
// similarity, then on the lexicographically smallest cluster-id pair, so
// the result is independent of mention order.
IdClustering agglomerative_cluster(const Topic& topic,
                                   const ScoreTable& scores, double threshold);

// s(c1, c2): mean probability of c1 being the child of c2 over all
// cross-cluster mention pairs. Four-class tables only.
double cluster_child_score(const std::vector<std::string>& c1,
                           const std::vector<std::string>& c2,
                           const ScoreTable& scores);

// Greedy acyclic construction: visit ordered cluster pairs by descending
// child score, add parent->child edges, discard cycle-creating candidates,
// ignore scores below `threshold`. Multiple parents are allowed unless
// `single_parent`.
ClusterGraph greedy_hierarchy(const IdClustering& clustering,
                              const ScoreTable& scores, double threshold,
                              bool single_parent = false,
                              bool stop_on_cycle = false);

// pairwise_scores -> agglomerative_cluster -> greedy_hierarchy. Coref-only
// sources produce an edgeless graph.
ClusterGraph run_pipeline(const Topic& topic, const ScorerConfig& cfg,
                          const ScoreTable* table = nullptr);

}  // namespace hiercoref
