#pragma once

#include <cstddef>
#include <vector>

#include "hiercoref/model.hpp"

namespace hiercoref {

// A clustering for evaluation: disjoint sets of mention identities.
// Each cluster is sorted; cluster order is not significant.
using Clustering = std::vector<std::vector<MentionKey>>;

// Maps a graph's mention-id clusters through the topic's mention table.
Clustering clustering_from_graph(const Topic& topic, const ClusterGraph& g);

// Removes all size-1 clusters. Applied independently to gold and system
// before scoring (default-on flag at the report level).
Clustering filter_singletons(const Clustering& c);

struct PRF {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;

  static PRF from(double recall, double precision);
};

// Raw numerators/denominators of one metric on one instance; pooling these
// across topics before dividing yields micro averages.
struct MetricCounts {
  double recall_num = 0.0;
  double recall_den = 0.0;
  double precision_num = 0.0;
  double precision_den = 0.0;

  void add(const MetricCounts& other);
};

struct MetricResult {
  PRF prf;
  MetricCounts counts;
};

// PRF from pooled counts. A zero denominator is vacuous: 1.0 on that side,
// all 1.0 when both sides are empty.
PRF prf_from_counts(const MetricCounts& counts);

MetricResult muc(const Clustering& gold, const Clustering& sys);
MetricResult b_cubed(const Clustering& gold, const Clustering& sys);
MetricResult ceaf_e(const Clustering& gold, const Clustering& sys);
MetricResult lea(const Clustering& gold, const Clustering& sys);

double conll_f1(const PRF& muc, const PRF& b3, const PRF& ceafe);

// Maximum-weight one-to-one assignment over a similarity matrix
// (rows x cols, not necessarily square). Exact O(n^3) Kuhn-Munkres.
double max_assignment(const std::vector<std::vector<double>>& sim);

}  // namespace hiercoref
