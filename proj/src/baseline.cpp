#include "hiercoref/baseline.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "hiercoref/agreement.hpp"
#include "hiercoref/inference.hpp"

namespace hiercoref {

namespace {

std::vector<ScoreTable> edit_tables(const std::vector<Topic>& topics,
                                    const EvalOptions& opts) {
  std::vector<ScoreTable> tables(topics.size());
  ScorerConfig cfg;  // edit-distance source
  parallel_for(topics.size(), opts.jobs, [&](std::size_t i) {
    tables[i] = pairwise_scores(topics[i], cfg);
  });
  return tables;
}

double micro_conll(const std::vector<Topic>& topics,
                   const std::vector<ScoreTable>& tables, double threshold,
                   const EvalOptions& opts,
                   std::vector<double>* per_topic = nullptr) {
  MetricCounts muc_pool, b3_pool, ceafe_pool;
  std::vector<std::array<MetricCounts, 3>> counts(topics.size());
  std::vector<double> topic_f1(topics.size(), 0.0);
  parallel_for(topics.size(), opts.jobs, [&](std::size_t i) {
    const Topic& topic = topics[i];
    if (!topic.gold) {
      throw ValidationError("topic " + topic.topic_id + ": no gold graph");
    }
    IdClustering ids = agglomerative_cluster(topic, tables[i], threshold);
    ClusterGraph predicted;
    predicted.clusters = ids;
    Clustering gc = clustering_from_graph(topic, *topic.gold);
    Clustering sc = clustering_from_graph(topic, predicted);
    if (opts.filter_singletons) {
      gc = filter_singletons(gc);
      sc = filter_singletons(sc);
    }
    MetricResult m = muc(gc, sc);
    MetricResult b = b_cubed(gc, sc);
    MetricResult c = ceaf_e(gc, sc);
    counts[i] = {m.counts, b.counts, c.counts};
    topic_f1[i] = conll_f1(m.prf, b.prf, c.prf);
  });
  for (const auto& c : counts) {
    muc_pool.add(c[0]);
    b3_pool.add(c[1]);
    ceafe_pool.add(c[2]);
  }
  if (per_topic != nullptr) *per_topic = topic_f1;
  return conll_f1(prf_from_counts(muc_pool), prf_from_counts(b3_pool),
                  prf_from_counts(ceafe_pool));
}

}  // namespace

double edit_baseline_conll(const std::vector<Topic>& topics, double threshold,
                           const EvalOptions& opts) {
  auto tables = edit_tables(topics, opts);
  return micro_conll(topics, tables, threshold, opts);
}

double tune_edit_threshold(const std::vector<Topic>& topics,
                           const std::vector<double>& grid,
                           const EvalOptions& opts) {
  if (grid.empty()) {
    throw ValidationError("tune_edit_threshold: empty grid");
  }
  auto tables = edit_tables(topics, opts);
  double best_threshold = grid.front();
  double best_score = -1.0;
  for (double threshold : grid) {
    double score = micro_conll(topics, tables, threshold, opts);
    if (score > best_score) {
      best_score = score;
      best_threshold = threshold;
    }
  }
  return best_threshold;
}

BaselineResult run_baseline(const std::vector<Topic>& tuning,
                            const std::vector<Topic>& eval_topics,
                            const BaselineOptions& opts) {
  BaselineResult result;
  result.threshold = opts.threshold
                         ? *opts.threshold
                         : tune_edit_threshold(tuning, opts.grid, opts.eval);

  auto tables = edit_tables(eval_topics, opts.eval);
  std::vector<Topic> predicted(eval_topics.size());
  parallel_for(eval_topics.size(), opts.eval.jobs, [&](std::size_t i) {
    Topic sys = eval_topics[i];
    ClusterGraph graph;
    graph.clusters = agglomerative_cluster(eval_topics[i], tables[i],
                                           result.threshold);
    sys.gold = std::move(graph);
    predicted[i] = std::move(sys);
  });
  result.reports = evaluate_corpus(eval_topics, predicted, opts.eval);
  result.micro = micro_aggregate(result.reports);

  std::vector<std::pair<std::string, double>> per_topic;
  per_topic.reserve(result.reports.size());
  for (const auto& r : result.reports) {
    per_topic.emplace_back(r.topic_id, r.conll);
  }
  auto slices = diversity_slices(per_topic, opts.fractions);
  std::map<std::string, const TopicReport*> by_id;
  for (const auto& r : result.reports) by_id[r.topic_id] = &r;
  for (std::size_t s = 0; s < slices.size(); ++s) {
    BaselineSlice slice;
    slice.fraction = opts.fractions[s];
    slice.topics = slices[s];
    std::vector<TopicReport> subset;
    subset.reserve(slice.topics.size());
    for (const auto& id : slice.topics) subset.push_back(*by_id.at(id));
    slice.micro = micro_aggregate(subset);
    result.slices.push_back(std::move(slice));
  }
  return result;
}

}  // namespace hiercoref
