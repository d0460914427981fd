#include "hiercoref/inference.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <numeric>

#include "hiercoref/graph.hpp"

namespace hiercoref {

int levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<int> row(b.size() + 1);
  std::iota(row.begin(), row.end(), 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    int diag = row[0];
    row[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      int next = std::min({row[j] + 1, row[j - 1] + 1,
                           diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = row[j];
      row[j] = next;
    }
  }
  return row[b.size()];
}

namespace {

// Lowercase with runs of whitespace collapsed to single spaces, trimmed.
std::string fold(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  return out;
}

}  // namespace

double edit_similarity(std::string_view a, std::string_view b) {
  std::string fa = fold(a);
  std::string fb = fold(b);
  const std::size_t longest = std::max(fa.size(), fb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(fa, fb)) /
                   static_cast<double>(longest);
}

ScoreTable pairwise_scores(const Topic& topic, const ScorerConfig& cfg,
                           const ScoreTable* table) {
  if (cfg.source == ScorerConfig::Source::kEditDistance) {
    ScoreTable out;
    out.topic_id = topic.topic_id;
    out.kind = ScoreKind::kCorefOnly;
    for (std::size_t i = 0; i < topic.mentions.size(); ++i) {
      for (std::size_t j = i + 1; j < topic.mentions.size(); ++j) {
        const auto& a = topic.mentions[i];
        const auto& b = topic.mentions[j];
        auto key = ScoreTable::pair_key(a.mention_id, b.mention_id);
        out.entries[key] = {edit_similarity(a.surface, b.surface), 0.0, 0.0,
                            0.0};
      }
    }
    return out;
  }

  if (table == nullptr) {
    throw ValidationError("topic " + topic.topic_id +
                          ": score-table source requires a table");
  }
  if (table->topic_id != topic.topic_id) {
    throw ValidationError("score table " + table->topic_id +
                          " does not cover topic " + topic.topic_id);
  }
  validate_score_table(*table, topic);
  const std::size_t n = topic.mentions.size();
  if (table->entries.size() != n * (n - 1) / 2) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto& a = topic.mentions[i].mention_id;
        const auto& b = topic.mentions[j].mention_id;
        if (!table->has(a, b)) {
          throw ValidationError("score table " + table->topic_id +
                                ": missing pair (" + a + ", " + b + ")");
        }
      }
    }
  }
  return *table;
}

IdClustering agglomerative_cluster(const Topic& topic,
                                   const ScoreTable& scores,
                                   double threshold) {
  // Canonical mention order makes merging independent of input order.
  std::vector<std::string> ids;
  ids.reserve(topic.mentions.size());
  for (const auto& m : topic.mentions) ids.push_back(m.mention_id);
  std::sort(ids.begin(), ids.end());
  const int n = static_cast<int>(ids.size());
  if (n == 0) return {};

  std::vector<std::vector<double>> sum(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      sum[i][j] = sum[j][i] = scores.coref_score(ids[i], ids[j]);
    }
  }

  // Slot i holds the cluster whose smallest member is mention i; merges keep
  // the smaller slot alive, so slot order is the cluster-id order.
  std::vector<std::vector<int>> members(n);
  std::vector<char> live(n, 1);
  for (int i = 0; i < n; ++i) members[i] = {i};

  int live_count = n;
  while (live_count > 1) {
    double best = -1.0;
    int best_a = -1, best_b = -1;
    for (int a = 0; a < n; ++a) {
      if (!live[a]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!live[b]) continue;
        double avg = sum[a][b] / (static_cast<double>(members[a].size()) *
                                  static_cast<double>(members[b].size()));
        if (avg > best) {  // first hit in slot order wins ties
          best = avg;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best < threshold) break;
    for (int c = 0; c < n; ++c) {
      if (!live[c] || c == best_a || c == best_b) continue;
      sum[best_a][c] += sum[best_b][c];
      sum[c][best_a] = sum[best_a][c];
    }
    members[best_a].insert(members[best_a].end(), members[best_b].begin(),
                           members[best_b].end());
    live[best_b] = 0;
    --live_count;
  }

  IdClustering out;
  for (int a = 0; a < n; ++a) {
    if (!live[a]) continue;
    std::sort(members[a].begin(), members[a].end());
    std::vector<std::string> cluster;
    cluster.reserve(members[a].size());
    for (int m : members[a]) cluster.push_back(ids[m]);
    out.push_back(std::move(cluster));
  }
  return out;
}

double cluster_child_score(const std::vector<std::string>& c1,
                           const std::vector<std::string>& c2,
                           const ScoreTable& scores) {
  double total = 0.0;
  for (const auto& m1 : c1) {
    for (const auto& m2 : c2) {
      total += scores.child_prob(m1, m2);
    }
  }
  return total / (static_cast<double>(c1.size()) *
                  static_cast<double>(c2.size()));
}

ClusterGraph greedy_hierarchy(const IdClustering& clustering,
                              const ScoreTable& scores, double threshold,
                              bool single_parent, bool stop_on_cycle) {
  const int n = static_cast<int>(clustering.size());
  struct Candidate {
    double score;
    int child;
    int parent;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      candidates.push_back(
          {cluster_child_score(clustering[i], clustering[j], scores), i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.child != b.child) return a.child < b.child;
              return a.parent < b.parent;
            });

  std::vector<std::vector<int>> children(n);
  std::vector<char> has_parent(n, 0);
  auto reaches = [&](int from, int to) {
    std::vector<char> seen(n, 0);
    std::deque<int> queue{from};
    seen[from] = 1;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      if (v == to) return true;
      for (int w : children[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          queue.push_back(w);
        }
      }
    }
    return false;
  };

  ClusterGraph out;
  out.clusters = clustering;
  for (const auto& cand : candidates) {
    if (cand.score < threshold) break;
    if (single_parent && has_parent[cand.child]) continue;
    if (reaches(cand.child, cand.parent)) {  // would close a directed cycle
      if (stop_on_cycle) break;
      continue;
    }
    children[cand.parent].push_back(cand.child);
    has_parent[cand.child] = 1;
    out.edges.emplace_back(cand.parent, cand.child);
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

ClusterGraph run_pipeline(const Topic& topic, const ScorerConfig& cfg,
                          const ScoreTable* table) {
  ScoreTable scores = pairwise_scores(topic, cfg, table);
  IdClustering clustering =
      agglomerative_cluster(topic, scores, cfg.clustering_threshold);
  if (scores.kind != ScoreKind::kFourClass) {
    ClusterGraph out;
    out.clusters = std::move(clustering);
    return out;  // no hierarchy signal in a coref-only table
  }
  return greedy_hierarchy(clustering, scores, cfg.hierarchy_threshold,
                          cfg.single_parent, cfg.stop_on_cycle);
}

}  // namespace hiercoref
