#include "hiercoref/coref_metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

namespace hiercoref {

Clustering clustering_from_graph(const Topic& topic, const ClusterGraph& g) {
  std::unordered_map<std::string, MentionKey> keys;
  for (const auto& m : topic.mentions) keys.emplace(m.mention_id, m.key());
  Clustering out;
  out.reserve(g.clusters.size());
  for (const auto& cluster : g.clusters) {
    std::vector<MentionKey> members;
    members.reserve(cluster.size());
    for (const auto& id : cluster) {
      auto it = keys.find(id);
      if (it == keys.end()) {
        throw ValidationError("topic " + topic.topic_id +
                              ": cluster references unknown mention " + id);
      }
      members.push_back(it->second);
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

Clustering filter_singletons(const Clustering& c) {
  Clustering out;
  for (const auto& cluster : c) {
    if (cluster.size() > 1) out.push_back(cluster);
  }
  return out;
}

PRF PRF::from(double recall, double precision) {
  PRF prf;
  prf.recall = recall;
  prf.precision = precision;
  prf.f1 = (recall + precision) > 0.0
               ? 2.0 * recall * precision / (recall + precision)
               : 0.0;
  return prf;
}

void MetricCounts::add(const MetricCounts& other) {
  recall_num += other.recall_num;
  recall_den += other.recall_den;
  precision_num += other.precision_num;
  precision_den += other.precision_den;
}

PRF prf_from_counts(const MetricCounts& counts) {
  if (counts.recall_den == 0.0 && counts.precision_den == 0.0) {
    return PRF{1.0, 1.0, 1.0};
  }
  double r = counts.recall_den > 0.0 ? counts.recall_num / counts.recall_den
                                     : 1.0;
  double p = counts.precision_den > 0.0
                 ? counts.precision_num / counts.precision_den
                 : 1.0;
  return PRF::from(r, p);
}

namespace {

struct Ratio {
  double num = 0.0;
  double den = 0.0;
};

// Member -> cluster index over one clustering.
std::map<MentionKey, int> membership(const Clustering& c) {
  std::map<MentionKey, int> where;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (const auto& m : c[i]) where[m] = static_cast<int>(i);
  }
  return where;
}

// One side has no clusters: its output is vacuously right (score 1) and the
// other direction scores 0. Both empty scores 1 everywhere.
bool degenerate(const Clustering& gold, const Clustering& sys,
                MetricResult* out) {
  if (!gold.empty() && !sys.empty()) return false;
  if (gold.empty() && sys.empty()) {
    out->prf = PRF{1.0, 1.0, 1.0};
  } else if (sys.empty()) {
    out->prf = PRF{0.0, 1.0, 0.0};
  } else {
    out->prf = PRF{1.0, 0.0, 0.0};
  }
  out->counts = MetricCounts{};
  return true;
}

// MUC: links of `base` clusters preserved by `other`'s partition of them;
// mentions unresolved in `other` partition as singletons.
Ratio muc_direction(const Clustering& base, const Clustering& other) {
  auto where = membership(other);
  Ratio ratio;
  for (const auto& cluster : base) {
    std::set<int> parts;
    int unresolved = 0;
    for (const auto& m : cluster) {
      auto it = where.find(m);
      if (it == where.end()) {
        ++unresolved;
      } else {
        parts.insert(it->second);
      }
    }
    const double size = static_cast<double>(cluster.size());
    ratio.num += size - static_cast<double>(parts.size() + unresolved);
    ratio.den += size - 1.0;
  }
  return ratio;
}

// B3: mean over `base` mentions of |K n R(m)| / |K|, with an empty
// counterpart cluster for mentions unclustered in `other`.
Ratio b3_direction(const Clustering& base, const Clustering& other) {
  auto where = membership(other);
  Ratio ratio;
  for (const auto& cluster : base) {
    const double size = static_cast<double>(cluster.size());
    ratio.den += size;
    std::map<int, int> overlap;
    for (const auto& m : cluster) {
      auto it = where.find(m);
      if (it != where.end()) ++overlap[it->second];
    }
    for (const auto& [idx, s] : overlap) {
      (void)idx;
      ratio.num += static_cast<double>(s) * static_cast<double>(s) / size;
    }
  }
  return ratio;
}

// LEA: size-weighted link-resolution ratios.
Ratio lea_direction(const Clustering& base, const Clustering& other) {
  auto where = membership(other);
  Ratio ratio;
  for (const auto& cluster : base) {
    const double size = static_cast<double>(cluster.size());
    ratio.den += size;
    double resolution = 0.0;
    if (cluster.size() == 1) {
      // Singleton convention (reachable only with filtering off): credit
      // iff the mention is also a singleton on the other side.
      auto it = where.find(cluster.front());
      if (it != where.end() && other[it->second].size() == 1) resolution = 1.0;
    } else {
      std::map<int, int> overlap;
      for (const auto& m : cluster) {
        auto it = where.find(m);
        if (it != where.end()) ++overlap[it->second];
      }
      double common = 0.0;
      for (const auto& [idx, s] : overlap) {
        (void)idx;
        common += static_cast<double>(s) * (s - 1) / 2.0;
      }
      resolution = common / (size * (size - 1.0) / 2.0);
    }
    ratio.num += size * resolution;
  }
  return ratio;
}

MetricResult assemble(const Ratio& recall, const Ratio& precision) {
  MetricResult result;
  result.counts.recall_num = recall.num;
  result.counts.recall_den = recall.den;
  result.counts.precision_num = precision.num;
  result.counts.precision_den = precision.den;
  // Formula-level zero denominators score 0 (the empty-side conventions are
  // handled in degenerate()).
  double r = recall.den > 0.0 ? recall.num / recall.den : 0.0;
  double p = precision.den > 0.0 ? precision.num / precision.den : 0.0;
  result.prf = PRF::from(r, p);
  return result;
}

}  // namespace

MetricResult muc(const Clustering& gold, const Clustering& sys) {
  MetricResult result;
  if (degenerate(gold, sys, &result)) return result;
  return assemble(muc_direction(gold, sys), muc_direction(sys, gold));
}

MetricResult b_cubed(const Clustering& gold, const Clustering& sys) {
  MetricResult result;
  if (degenerate(gold, sys, &result)) return result;
  return assemble(b3_direction(gold, sys), b3_direction(sys, gold));
}

MetricResult lea(const Clustering& gold, const Clustering& sys) {
  MetricResult result;
  if (degenerate(gold, sys, &result)) return result;
  return assemble(lea_direction(gold, sys), lea_direction(sys, gold));
}

MetricResult ceaf_e(const Clustering& gold, const Clustering& sys) {
  MetricResult result;
  if (degenerate(gold, sys, &result)) return result;

  std::vector<std::vector<double>> phi(gold.size(),
                                       std::vector<double>(sys.size(), 0.0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (std::size_t j = 0; j < sys.size(); ++j) {
      std::vector<MentionKey> common;
      std::set_intersection(gold[i].begin(), gold[i].end(), sys[j].begin(),
                            sys[j].end(), std::back_inserter(common));
      phi[i][j] = 2.0 * static_cast<double>(common.size()) /
                  static_cast<double>(gold[i].size() + sys[j].size());
    }
  }
  const double total = max_assignment(phi);
  return assemble(Ratio{total, static_cast<double>(gold.size())},
                  Ratio{total, static_cast<double>(sys.size())});
}

double conll_f1(const PRF& muc, const PRF& b3, const PRF& ceafe) {
  return (muc.f1 + b3.f1 + ceafe.f1) / 3.0;
}

double max_assignment(const std::vector<std::vector<double>>& sim) {
  const int rows = static_cast<int>(sim.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(sim[0].size());
  const int n = std::max(rows, cols);
  if (n == 0) return 0.0;

  // Kuhn-Munkres with potentials on a zero-padded square cost matrix
  // (cost = -similarity to turn maximization into minimization).
  auto cost = [&](int i, int j) {
    return (i < rows && j < cols) ? -sim[i][j] : 0.0;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (match[j] != 0) total += -cost(match[j] - 1, j - 1);
  }
  return total;
}

}  // namespace hiercoref
