#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hiercoref/coref_metrics.hpp"
#include "hiercoref/hierarchy_metrics.hpp"
#include "hiercoref/model.hpp"

namespace hiercoref {

enum class IaaMetric { kConll, kHierarchy, kPath };

struct Annotation {
  std::string annotator_id;
  ClusterGraph graph;
};

// Score of one annotator pair on one topic, with the pieces needed to pool
// micro averages later. ann_a < ann_b; all metrics here are symmetric in F1.
struct PairTopicScore {
  std::string topic_id;
  std::string ann_a;
  std::string ann_b;
  double score = 0.0;
  std::array<MetricCounts, 3> conll_parts{};  // muc, b3, ceafe
  MetricCounts hier{};
  double path_sum = 0.0;
  std::size_t path_pairs = 0;
};

struct IaaOptions {
  IaaMetric metric = IaaMetric::kConll;
  Overlap overlap = Overlap::kAnyPair;
  bool filter_singletons = true;
};

// Symmetric per-pair score matrix aligned with `annotations` order.
// Throws ValidationError when annotations disagree on the mention universe.
std::vector<std::vector<double>> pairwise_iaa(
    const std::vector<Annotation>& annotations, const Topic& topic,
    const IaaOptions& opts);

// Same computation, one record per unordered annotator pair.
std::vector<PairTopicScore> pairwise_iaa_scores(
    const std::vector<Annotation>& annotations, const Topic& topic,
    const IaaOptions& opts);

struct IaaSummary {
  double avg = 0.0;        // micro over all pairs and topics
  double max_micro = 0.0;  // per-topic best pairs, counts pooled
  double max_macro = 0.0;  // mean over topics of the best pair score
};

// `global_best_pair` switches MAX-micro to the single annotator pair with
// the best pooled score across all topics.
IaaSummary iaa_summary(const std::vector<PairTopicScore>& scores,
                       IaaMetric metric, bool global_best_pair = false);

// Topics sorted ascending by baseline score (ties by topic_id); one subset
// of the bottom floor(fraction * n) ids per fraction.
std::vector<std::vector<std::string>> diversity_slices(
    const std::vector<std::pair<std::string, double>>& baseline_scores,
    const std::vector<double>& fractions);

// Topic ids whose metadata marks them with a truthy `flag` value.
std::vector<std::string> flagged_topics(const std::vector<Topic>& topics,
                                        const std::string& flag);

struct Correlation {
  std::optional<double> pearson_r;
  std::optional<double> pearson_p;
  std::optional<double> spearman_rho;
  std::optional<double> spearman_p;
};

// Pearson on values, Spearman on average ranks; two-sided p-values from the
// t approximation with n-2 degrees of freedom. Constant input leaves the
// corresponding fields absent.
Correlation rank_correlation(const std::vector<double>& x,
                             const std::vector<double>& y);

}  // namespace hiercoref
