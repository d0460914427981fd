#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hiercoref/report.hpp"

namespace hiercoref {

struct BaselineOptions {
  std::optional<double> threshold;   // forced; otherwise tuned on `tuning`
  std::vector<double> grid = {0.50, 0.55, 0.60, 0.65, 0.70,
                              0.75, 0.80, 0.85, 0.90, 0.95};
  std::vector<double> fractions = {0.1, 0.2};
  EvalOptions eval;
};

struct BaselineSlice {
  double fraction = 0.0;
  std::vector<std::string> topics;
  AggregateReport micro;
};

struct BaselineResult {
  double threshold = 0.0;
  std::vector<TopicReport> reports;  // per evaluation topic
  AggregateReport micro;
  std::vector<BaselineSlice> slices;
};

// Micro CoNLL F1 of edit-distance clustering at `threshold`, each topic
// scored against its own gold.
double edit_baseline_conll(const std::vector<Topic>& topics, double threshold,
                           const EvalOptions& opts);

// Grid search maximizing micro CoNLL F1; earlier grid values win ties.
double tune_edit_threshold(const std::vector<Topic>& topics,
                           const std::vector<double>& grid,
                           const EvalOptions& opts);

// Edit-distance baseline end to end: tune on `tuning`, cluster and evaluate
// `eval_topics`, slice bottom fractions by the baseline's own per-topic
// CoNLL F1.
BaselineResult run_baseline(const std::vector<Topic>& tuning,
                            const std::vector<Topic>& eval_topics,
                            const BaselineOptions& opts);

}  // namespace hiercoref
