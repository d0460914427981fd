#include "hiercoref/report.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <json.hpp>

namespace hiercoref {

using nlohmann::json;

namespace {

const ClusterGraph& graph_of(const Topic& topic) {
  if (!topic.gold) {
    throw ValidationError("topic " + topic.topic_id +
                          ": no clusters/relations to evaluate");
  }
  return *topic.gold;
}

void check_same_universe(const Topic& gold, const Topic& sys) {
  std::set<MentionKey> gold_keys, sys_keys;
  for (const auto& m : gold.mentions) gold_keys.insert(m.key());
  for (const auto& m : sys.mentions) sys_keys.insert(m.key());
  if (gold_keys != sys_keys) {
    throw ValidationError("topic " + gold.topic_id +
                          ": gold and system mention sets differ");
  }
}

}  // namespace

TopicReport evaluate_topic(const Topic& gold, const Topic& sys,
                           const EvalOptions& opts) {
  check_same_universe(gold, sys);
  const ClusterGraph& gold_graph = graph_of(gold);
  const ClusterGraph& sys_graph = graph_of(sys);

  TopicReport report;
  report.topic_id = gold.topic_id;

  Clustering gc = clustering_from_graph(gold, gold_graph);
  Clustering sc = clustering_from_graph(sys, sys_graph);
  if (opts.filter_singletons) {
    gc = filter_singletons(gc);
    sc = filter_singletons(sc);
  }
  report.muc = muc(gc, sc);
  report.b3 = b_cubed(gc, sc);
  report.ceafe = ceaf_e(gc, sc);
  report.lea = lea(gc, sc);
  report.conll = conll_f1(report.muc.prf, report.b3.prf, report.ceafe.prf);

  EvalGraph gold_eval = eval_graph(gold, gold_graph);
  EvalGraph sys_eval = eval_graph(sys, sys_graph);
  report.hier_any = hierarchy_score(gold_eval, sys_eval, Overlap::kAnyPair);
  report.hier_half = hierarchy_score(gold_eval, sys_eval, Overlap::kHalf);
  PathScore path = path_distance_score(gold_eval, sys_eval, opts.closed_paths);
  report.path_ratio = path.score;
  report.path_sum = path.ratio_sum;
  report.path_pairs = path.pair_count;
  return report;
}

std::vector<TopicReport> evaluate_corpus(const std::vector<Topic>& gold,
                                         const std::vector<Topic>& sys,
                                         const EvalOptions& opts) {
  std::map<std::string, const Topic*> sys_by_id;
  for (const auto& t : sys) sys_by_id[t.topic_id] = &t;
  std::vector<std::pair<const Topic*, const Topic*>> pairs;
  for (const auto& g : gold) {
    auto it = sys_by_id.find(g.topic_id);
    if (it == sys_by_id.end()) {
      throw ValidationError("system output missing topic " + g.topic_id);
    }
    pairs.emplace_back(&g, it->second);
  }
  if (sys.size() > gold.size()) {
    std::set<std::string> gold_ids;
    for (const auto& g : gold) gold_ids.insert(g.topic_id);
    for (const auto& s : sys) {
      if (!gold_ids.count(s.topic_id)) {
        throw ValidationError("system output has unknown topic " + s.topic_id);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return a.first->topic_id < b.first->topic_id;
  });

  std::vector<TopicReport> reports(pairs.size());
  parallel_for(pairs.size(), opts.jobs, [&](std::size_t i) {
    reports[i] = evaluate_topic(*pairs[i].first, *pairs[i].second, opts);
  });
  return reports;
}

AggregateReport micro_aggregate(const std::vector<TopicReport>& reports) {
  AggregateReport agg;
  agg.label = "micro";
  agg.topics = reports.size();
  MetricCounts muc_c, b3_c, ceafe_c, lea_c, hier_any_c, hier_half_c;
  double path_sum = 0.0;
  std::size_t path_pairs = 0;
  for (const auto& r : reports) {
    muc_c.add(r.muc.counts);
    b3_c.add(r.b3.counts);
    ceafe_c.add(r.ceafe.counts);
    lea_c.add(r.lea.counts);
    hier_any_c.add(r.hier_any.counts);
    hier_half_c.add(r.hier_half.counts);
    path_sum += r.path_sum;
    path_pairs += r.path_pairs;
  }
  agg.muc = prf_from_counts(muc_c);
  agg.b3 = prf_from_counts(b3_c);
  agg.ceafe = prf_from_counts(ceafe_c);
  agg.lea = prf_from_counts(lea_c);
  agg.conll = conll_f1(agg.muc, agg.b3, agg.ceafe);
  agg.hier_any = prf_from_counts(hier_any_c);
  agg.hier_half = prf_from_counts(hier_half_c);
  agg.path_ratio =
      path_pairs > 0 ? path_sum / static_cast<double>(path_pairs) : 1.0;
  return agg;
}

AggregateReport macro_aggregate(const std::vector<TopicReport>& reports) {
  AggregateReport agg;
  agg.label = "macro";
  agg.topics = reports.size();
  if (reports.empty()) return agg;
  auto mean_prf = [&](auto pick) {
    PRF mean;
    for (const auto& r : reports) {
      const PRF& prf = pick(r);
      mean.recall += prf.recall;
      mean.precision += prf.precision;
      mean.f1 += prf.f1;
    }
    const double n = static_cast<double>(reports.size());
    mean.recall /= n;
    mean.precision /= n;
    mean.f1 /= n;
    return mean;
  };
  agg.muc = mean_prf([](const TopicReport& r) { return r.muc.prf; });
  agg.b3 = mean_prf([](const TopicReport& r) { return r.b3.prf; });
  agg.ceafe = mean_prf([](const TopicReport& r) { return r.ceafe.prf; });
  agg.lea = mean_prf([](const TopicReport& r) { return r.lea.prf; });
  agg.hier_any = mean_prf([](const TopicReport& r) { return r.hier_any.prf; });
  agg.hier_half =
      mean_prf([](const TopicReport& r) { return r.hier_half.prf; });
  double conll = 0.0, path = 0.0;
  for (const auto& r : reports) {
    conll += r.conll;
    path += r.path_ratio;
  }
  agg.conll = conll / static_cast<double>(reports.size());
  agg.path_ratio = path / static_cast<double>(reports.size());
  return agg;
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%7.4f", v);
  return buf;
}

void table_row(std::string* out, const std::string& label, const PRF& muc,
               const PRF& b3, const PRF& ceafe, const PRF& lea, double conll,
               const PRF& any, const PRF& half, double path) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-18s", label.c_str());
  *out += buf;
  for (double v : {muc.f1, b3.f1, ceafe.f1, lea.f1, conll, any.f1, half.f1,
                   path}) {
    *out += ' ';
    *out += fixed(v);
  }
  *out += '\n';
}

}  // namespace

std::string render_report_table(const std::vector<TopicReport>& reports,
                                const std::vector<AggregateReport>& totals,
                                bool per_topic_rows) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-18s %7s %7s %7s %7s %7s %7s %7s %7s\n",
                "topic", "MUC", "B3", "CEAFe", "LEA", "CoNLL", "Hier",
                "Hier50", "Path");
  out += buf;
  if (per_topic_rows) {
    for (const auto& r : reports) {
      table_row(&out, r.topic_id, r.muc.prf, r.b3.prf, r.ceafe.prf, r.lea.prf,
                r.conll, r.hier_any.prf, r.hier_half.prf, r.path_ratio);
    }
  }
  for (const auto& t : totals) {
    table_row(&out, t.label, t.muc, t.b3, t.ceafe, t.lea, t.conll, t.hier_any,
              t.hier_half, t.path_ratio);
  }
  return out;
}

namespace {

json prf_json(const PRF& prf) {
  return json{{"recall", prf.recall},
              {"precision", prf.precision},
              {"f1", prf.f1}};
}

}  // namespace

std::string report_to_json_line(const TopicReport& r) {
  json j;
  j["topic_id"] = r.topic_id;
  j["muc"] = prf_json(r.muc.prf);
  j["b3"] = prf_json(r.b3.prf);
  j["ceafe"] = prf_json(r.ceafe.prf);
  j["lea"] = prf_json(r.lea.prf);
  j["conll"] = r.conll;
  j["hierarchy"] = json{{"any_pair", prf_json(r.hier_any.prf)},
                        {"half", prf_json(r.hier_half.prf)}};
  j["path_ratio"] = r.path_ratio;
  j["pairs_in_w"] = r.path_pairs;
  return j.dump();
}

std::string aggregate_to_json_line(const AggregateReport& r) {
  json j;
  j["aggregate"] = r.label;
  j["topics"] = r.topics;
  j["muc"] = prf_json(r.muc);
  j["b3"] = prf_json(r.b3);
  j["ceafe"] = prf_json(r.ceafe);
  j["lea"] = prf_json(r.lea);
  j["conll"] = r.conll;
  j["hierarchy"] =
      json{{"any_pair", prf_json(r.hier_any)}, {"half", prf_json(r.hier_half)}};
  j["path_ratio"] = r.path_ratio;
  return j.dump();
}

void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace hiercoref
