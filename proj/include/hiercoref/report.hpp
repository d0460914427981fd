#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hiercoref/coref_metrics.hpp"
#include "hiercoref/hierarchy_metrics.hpp"
#include "hiercoref/model.hpp"

namespace hiercoref {

struct EvalOptions {
  bool filter_singletons = true;
  bool closed_paths = false;
  int jobs = 1;
};

struct TopicReport {
  std::string topic_id;
  MetricResult muc, b3, ceafe, lea;
  double conll = 0.0;
  MetricResult hier_any, hier_half;
  double path_ratio = 1.0;
  double path_sum = 0.0;
  std::size_t path_pairs = 0;
};

struct AggregateReport {
  std::string label;
  PRF muc, b3, ceafe, lea;
  double conll = 0.0;
  PRF hier_any, hier_half;
  double path_ratio = 1.0;
  std::size_t topics = 0;
};

TopicReport evaluate_topic(const Topic& gold, const Topic& sys,
                           const EvalOptions& opts);

// Pairs gold and system topics by topic_id (throws ValidationError on a
// mismatch), evaluates each pair, and returns reports ordered by topic_id.
std::vector<TopicReport> evaluate_corpus(const std::vector<Topic>& gold,
                                         const std::vector<Topic>& sys,
                                         const EvalOptions& opts);

// Micro pools per-topic numerators/denominators before dividing; macro
// averages per-topic scores.
AggregateReport micro_aggregate(const std::vector<TopicReport>& reports);
AggregateReport macro_aggregate(const std::vector<TopicReport>& reports);

std::string render_report_table(const std::vector<TopicReport>& reports,
                                const std::vector<AggregateReport>& totals,
                                bool per_topic_rows);
std::string report_to_json_line(const TopicReport& r);
std::string aggregate_to_json_line(const AggregateReport& r);

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Exceptions are
// rethrown on the caller.
void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn);

}  // namespace hiercoref
