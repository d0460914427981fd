#include "hiercoref/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace hiercoref {

namespace {

PairTopicScore score_pair(const Topic& topic, const Annotation& first,
                          const Annotation& second, const IaaOptions& opts) {
  // Canonical orientation: the annotator with the smaller id plays gold, so
  // pooled counts do not depend on caller ordering.
  const bool in_order = first.annotator_id <= second.annotator_id;
  const Annotation& a = in_order ? first : second;
  const Annotation& b = in_order ? second : first;
  PairTopicScore out;
  out.topic_id = topic.topic_id;
  out.ann_a = a.annotator_id;
  out.ann_b = b.annotator_id;

  switch (opts.metric) {
    case IaaMetric::kConll: {
      Clustering ca = clustering_from_graph(topic, a.graph);
      Clustering cb = clustering_from_graph(topic, b.graph);
      if (opts.filter_singletons) {
        ca = filter_singletons(ca);
        cb = filter_singletons(cb);
      }
      MetricResult m = muc(ca, cb);
      MetricResult b3 = b_cubed(ca, cb);
      MetricResult ce = ceaf_e(ca, cb);
      out.conll_parts = {m.counts, b3.counts, ce.counts};
      out.score = conll_f1(m.prf, b3.prf, ce.prf);
      break;
    }
    case IaaMetric::kHierarchy: {
      MetricResult h = hierarchy_score(eval_graph(topic, a.graph),
                                       eval_graph(topic, b.graph),
                                       opts.overlap);
      out.hier = h.counts;
      out.score = h.prf.f1;
      break;
    }
    case IaaMetric::kPath: {
      PathScore p = path_distance_score(eval_graph(topic, a.graph),
                                        eval_graph(topic, b.graph));
      out.path_sum = p.ratio_sum;
      out.path_pairs = p.pair_count;
      out.score = p.score;
      break;
    }
  }
  return out;
}

void check_universe(const std::vector<Annotation>& annotations,
                    const Topic& topic) {
  if (annotations.size() < 2) {
    throw ValidationError("topic " + topic.topic_id +
                          ": need at least two annotations");
  }
  std::set<std::string> reference;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    std::set<std::string> covered;
    for (const auto& cluster : annotations[i].graph.clusters) {
      covered.insert(cluster.begin(), cluster.end());
    }
    if (i == 0) {
      reference = std::move(covered);
    } else if (covered != reference) {
      throw ValidationError("topic " + topic.topic_id + ": annotators " +
                            annotations[0].annotator_id + " and " +
                            annotations[i].annotator_id +
                            " cover different mention sets");
    }
  }
}

// Pooled score over a set of pair records, per the selected metric.
double pooled_score(const std::vector<const PairTopicScore*>& records,
                    IaaMetric metric) {
  switch (metric) {
    case IaaMetric::kConll: {
      std::array<MetricCounts, 3> parts{};
      for (const auto* r : records) {
        for (std::size_t i = 0; i < 3; ++i) parts[i].add(r->conll_parts[i]);
      }
      return conll_f1(prf_from_counts(parts[0]), prf_from_counts(parts[1]),
                      prf_from_counts(parts[2]));
    }
    case IaaMetric::kHierarchy: {
      MetricCounts pooled;
      for (const auto* r : records) pooled.add(r->hier);
      return prf_from_counts(pooled).f1;
    }
    case IaaMetric::kPath: {
      double sum = 0.0;
      std::size_t pairs = 0;
      for (const auto* r : records) {
        sum += r->path_sum;
        pairs += r->path_pairs;
      }
      return pairs > 0 ? sum / static_cast<double>(pairs) : 1.0;
    }
  }
  return 0.0;
}

}  // namespace

std::vector<PairTopicScore> pairwise_iaa_scores(
    const std::vector<Annotation>& annotations, const Topic& topic,
    const IaaOptions& opts) {
  check_universe(annotations, topic);
  std::vector<PairTopicScore> scores;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    for (std::size_t j = i + 1; j < annotations.size(); ++j) {
      scores.push_back(score_pair(topic, annotations[i], annotations[j], opts));
    }
  }
  return scores;
}

std::vector<std::vector<double>> pairwise_iaa(
    const std::vector<Annotation>& annotations, const Topic& topic,
    const IaaOptions& opts) {
  check_universe(annotations, topic);
  const std::size_t n = annotations.size();
  std::vector<std::vector<double>> matrix(n, std::vector<double>(n, 1.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double f1 =
          score_pair(topic, annotations[i], annotations[j], opts).score;
      matrix[i][j] = matrix[j][i] = f1;
    }
  }
  return matrix;
}

IaaSummary iaa_summary(const std::vector<PairTopicScore>& scores,
                       IaaMetric metric, bool global_best_pair) {
  if (scores.empty()) {
    throw ValidationError("iaa_summary: no pair scores");
  }
  IaaSummary summary;

  std::vector<const PairTopicScore*> all;
  for (const auto& s : scores) all.push_back(&s);
  summary.avg = pooled_score(all, metric);

  // Per-topic best pairs; ties resolved by annotator-pair order.
  std::map<std::string, const PairTopicScore*> best_per_topic;
  for (const auto& s : scores) {
    auto [it, inserted] = best_per_topic.emplace(s.topic_id, &s);
    if (!inserted) {
      const PairTopicScore* cur = it->second;
      if (s.score > cur->score ||
          (s.score == cur->score &&
           std::tie(s.ann_a, s.ann_b) < std::tie(cur->ann_a, cur->ann_b))) {
        it->second = &s;
      }
    }
  }
  double macro_sum = 0.0;
  std::vector<const PairTopicScore*> best_records;
  for (const auto& [tid, rec] : best_per_topic) {
    (void)tid;
    macro_sum += rec->score;
    best_records.push_back(rec);
  }
  summary.max_macro = macro_sum / static_cast<double>(best_per_topic.size());

  if (global_best_pair) {
    std::map<std::pair<std::string, std::string>,
             std::vector<const PairTopicScore*>>
        by_pair;
    for (const auto& s : scores) by_pair[{s.ann_a, s.ann_b}].push_back(&s);
    double best = -1.0;
    for (const auto& [pair, records] : by_pair) {
      (void)pair;
      best = std::max(best, pooled_score(records, metric));
    }
    summary.max_micro = best;
  } else {
    summary.max_micro = pooled_score(best_records, metric);
  }
  return summary;
}

std::vector<std::vector<std::string>> diversity_slices(
    const std::vector<std::pair<std::string, double>>& baseline_scores,
    const std::vector<double>& fractions) {
  std::vector<std::pair<std::string, double>> ranked = baseline_scores;
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second < b.second;
              return a.first < b.first;
            });
  std::vector<std::vector<std::string>> slices;
  for (double fraction : fractions) {
    auto take = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(ranked.size())));
    take = std::min(take, ranked.size());
    std::vector<std::string> ids;
    ids.reserve(take);
    for (std::size_t i = 0; i < take; ++i) ids.push_back(ranked[i].first);
    slices.push_back(std::move(ids));
  }
  return slices;
}

std::vector<std::string> flagged_topics(const std::vector<Topic>& topics,
                                        const std::string& flag) {
  std::vector<std::string> out;
  for (const auto& t : topics) {
    auto it = t.metadata.find(flag);
    if (it != t.metadata.end() &&
        (it->second == "true" || it->second == "1" || it->second == "yes")) {
      out.push_back(t.topic_id);
    }
  }
  return out;
}

namespace {

// Regularized incomplete beta via its continued fraction.
double beta_cf(double a, double b, double x) {
  const double tiny = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

// Two-sided p for a correlation coefficient under the t approximation.
double correlation_p_value(double r, std::size_t n) {
  const double df = static_cast<double>(n) - 2.0;
  const double denom = 1.0 - r * r;
  if (denom <= 0.0) return 0.0;
  const double t2 = r * r * df / denom;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t2));
}

std::optional<double> pearson(const std::vector<double>& x,
                              const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

// Average ranks (midranks for ties), 1-based.
std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

Correlation rank_correlation(const std::vector<double>& x,
                             const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw ValidationError(
        "rank_correlation: inputs must have equal length >= 3");
  }
  Correlation out;
  if (auto r = pearson(x, y)) {
    out.pearson_r = *r;
    out.pearson_p = correlation_p_value(*r, x.size());
  }
  if (auto rho = pearson(midranks(x), midranks(y))) {
    out.spearman_rho = *rho;
    out.spearman_p = correlation_p_value(*rho, x.size());
  }
  return out;
}

}  // namespace hiercoref
