#include "hiercoref/candidate_prep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "hiercoref/inference.hpp"

namespace hiercoref {

std::string normalize_surface(std::string_view s) {
  std::string spaced;
  spaced.reserve(s.size());
  for (char ch : s) {
    unsigned char uc = static_cast<unsigned char>(ch);
    if (std::ispunct(uc)) {
      spaced += ' ';
    } else {
      spaced += static_cast<char>(std::tolower(uc));
    }
  }
  std::istringstream in(spaced);
  std::string token, out;
  while (in >> token) {
    // Plural surrogate: drop one trailing 's' from longer tokens, keeping
    // "ss" endings and short tokens (acronyms) intact.
    if (token.size() >= 4 && token.back() == 's' &&
        token[token.size() - 2] != 's') {
      token.pop_back();
    }
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

int ConceptGraph::find_node(const std::string& surface) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].surface == surface) return static_cast<int>(i);
  }
  return -1;
}

ConceptGraph merge_graphs(const ConceptGraph& a, const ConceptGraph& b,
                          double sim_threshold) {
  std::vector<ConceptNode> pool = a.nodes;
  pool.insert(pool.end(), b.nodes.begin(), b.nodes.end());
  const int n = static_cast<int>(pool.size());

  std::vector<std::string> normalized(n);
  for (int i = 0; i < n; ++i) normalized[i] = normalize_surface(pool[i].surface);

  // Single-link closure over the unification relation.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (find(i) == find(j)) continue;
      if (normalized[i] == normalized[j] ||
          edit_similarity(normalized[i], normalized[j]) >= sim_threshold) {
        parent[find(i)] = find(j);
      }
    }
  }

  std::map<int, int> group_to_index;
  ConceptGraph out;
  for (int i = 0; i < n; ++i) {
    int g = find(i);
    auto [it, inserted] = group_to_index.emplace(g, out.nodes.size());
    if (inserted) {
      out.nodes.push_back(pool[i]);
    } else {
      ConceptNode& node = out.nodes[it->second];
      if (pool[i].surface < node.surface) node.surface = pool[i].surface;
      node.tags.insert(pool[i].tags.begin(), pool[i].tags.end());
    }
  }
  // The first member may not be the smallest surface; fix representatives.
  for (int i = 0; i < n; ++i) {
    ConceptNode& node = out.nodes[group_to_index[find(i)]];
    if (pool[i].surface < node.surface) node.surface = pool[i].surface;
  }

  std::set<std::pair<int, int>> edges;
  const int offset = static_cast<int>(a.nodes.size());
  for (const auto& [p, c] : a.edges) {
    int pp = group_to_index[find(p)], cc = group_to_index[find(c)];
    if (pp != cc) edges.emplace(pp, cc);
  }
  for (const auto& [p, c] : b.edges) {
    int pp = group_to_index[find(p + offset)],
        cc = group_to_index[find(c + offset)];
    if (pp != cc) edges.emplace(pp, cc);
  }
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

std::vector<std::vector<std::string>> form_groups(
    const ConceptGraph& g,
    const std::vector<std::vector<std::string>>& curated) {
  std::vector<std::vector<std::string>> groups;
  for (std::size_t p = 0; p < g.nodes.size(); ++p) {
    std::set<std::string> children;
    for (const auto& [from, to] : g.edges) {
      if (from == static_cast<int>(p)) children.insert(g.nodes[to].surface);
    }
    if (children.empty()) continue;
    std::vector<std::string> group{g.nodes[p].surface};
    group.insert(group.end(), children.begin(), children.end());
    groups.push_back(std::move(group));
  }
  groups.insert(groups.end(), curated.begin(), curated.end());
  return groups;
}

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine_similarity: dimension mismatch (" +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

RetrievalResult retrieve_mentions(const std::vector<std::string>& group,
                                  const MentionCorpus& corpus,
                                  const EmbeddingTable& emb,
                                  const RetrievalConfig& cfg) {
  if (emb.entries.empty()) {
    throw ValidationError("retrieve_mentions: empty embedding table");
  }
  validate_embedding_table(emb);

  struct Candidate {
    std::size_t index;
    const std::vector<double>* vec;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    if (const auto* vec = emb.find(corpus.entries[i].surface)) {
      candidates.push_back({i, vec});
    }
  }

  RetrievalResult result;
  std::map<std::size_t, double> best;  // corpus index -> best similarity
  std::vector<double> best_any(corpus.entries.size(), -1.0);

  for (const auto& concept_name : group) {
    const auto* qvec = emb.find(concept_name);
    if (qvec == nullptr) {
      result.missing_embeddings.push_back(concept_name);
      continue;
    }
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(candidates.size());
    for (const auto& cand : candidates) {
      double sim = cosine_similarity(*qvec, *cand.vec);
      best_any[cand.index] = std::max(best_any[cand.index], sim);
      if (sim > cfg.min_similarity) scored.emplace_back(sim, cand.index);
    }
    std::sort(scored.begin(), scored.end(),
              [&](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                const auto& sa = corpus.entries[a.second].surface;
                const auto& sb = corpus.entries[b.second].surface;
                if (sa != sb) return sa < sb;
                return a.second < b.second;
              });
    const std::size_t take =
        std::min<std::size_t>(scored.size(), static_cast<std::size_t>(cfg.k));
    for (std::size_t i = 0; i < take; ++i) {
      auto [sim, idx] = scored[i];
      auto it = best.find(idx);
      if (it == best.end() || sim > it->second) best[idx] = sim;
    }
  }

  // Proportional top-up from the smaller of two corpus sources.
  std::map<std::string, std::size_t> source_sizes;
  for (const auto& e : corpus.entries) ++source_sizes[e.source];
  const std::size_t cap =
      static_cast<std::size_t>(cfg.k) * std::max<std::size_t>(group.size(), 1);
  if (source_sizes.size() == 2) {
    auto it = source_sizes.begin();
    auto [src_a, size_a] = *it;
    auto [src_b, size_b] = *std::next(it);
    const std::string small_src = size_a < size_b ? src_a : src_b;
    const std::string big_src = size_a < size_b ? src_b : src_a;
    const double small_size = static_cast<double>(std::min(size_a, size_b));
    const double big_size = static_cast<double>(std::max(size_a, size_b));
    if (small_src != big_src && big_size > 0) {
      std::size_t from_big = 0, from_small = 0;
      for (const auto& [idx, sim] : best) {
        (void)sim;
        if (corpus.entries[idx].source == big_src) ++from_big;
        else ++from_small;
      }
      const auto target = static_cast<std::size_t>(std::llround(
          static_cast<double>(from_big) / big_size * small_size));
      if (from_small < target) {
        std::vector<std::size_t> eligible;
        for (const auto& cand : candidates) {
          if (corpus.entries[cand.index].source == small_src &&
              best_any[cand.index] > cfg.min_similarity &&
              !best.count(cand.index)) {
            eligible.push_back(cand.index);
          }
        }
        std::mt19937_64 rng(cfg.seed);
        std::shuffle(eligible.begin(), eligible.end(), rng);
        for (std::size_t idx : eligible) {
          if (from_small >= target) break;
          if (best.size() >= cap) {
            // Evict the weakest big-source retrieval to stay within the
            // k * |group| bound.
            auto weakest = best.end();
            for (auto it = best.begin(); it != best.end(); ++it) {
              if (corpus.entries[it->first].source != big_src) continue;
              if (weakest == best.end() || it->second < weakest->second ||
                  (it->second == weakest->second &&
                   it->first > weakest->first)) {
                weakest = it;
              }
            }
            if (weakest == best.end()) break;
            best.erase(weakest);
          }
          best[idx] = best_any[idx];
          ++from_small;
        }
      }
    }
  }

  for (const auto& [idx, sim] : best) {
    if (result.mentions.size() >= cap) break;
    result.mentions.push_back({idx, sim});
  }
  return result;
}

namespace {

std::vector<std::string> whitespace_tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

}  // namespace

Topic build_candidate_topic(const std::string& topic_id,
                            const MentionCorpus& corpus,
                            const std::vector<RetrievedMention>& retrieved) {
  Topic topic;
  topic.topic_id = topic_id;
  std::unordered_map<std::string, std::size_t> doc_index;
  std::set<MentionKey> seen;
  for (const auto& r : retrieved) {
    const CorpusEntry& entry = corpus.entries[r.corpus_index];
    std::vector<std::string> tokens = entry.tokens;
    int start = entry.start, end = entry.end;
    if (tokens.empty() || start < 0 || end <= start ||
        end > static_cast<int>(tokens.size())) {
      tokens = whitespace_tokens(entry.surface);
      start = 0;
      end = static_cast<int>(tokens.size());
    }
    if (tokens.empty()) continue;

    std::string doc_id = entry.doc_id.empty()
                             ? "d" + std::to_string(r.corpus_index)
                             : entry.doc_id;
    auto it = doc_index.find(doc_id);
    if (it == doc_index.end()) {
      doc_index.emplace(doc_id, topic.documents.size());
      Document doc;
      doc.doc_id = doc_id;
      doc.tokens = tokens;
      topic.documents.push_back(std::move(doc));
    } else if (topic.documents[it->second].tokens != tokens) {
      doc_id += "#" + std::to_string(r.corpus_index);
      doc_index.emplace(doc_id, topic.documents.size());
      Document doc;
      doc.doc_id = doc_id;
      doc.tokens = tokens;
      topic.documents.push_back(std::move(doc));
    }

    MentionKey key{doc_id, start, end};
    if (!seen.insert(key).second) continue;  // same span retrieved twice
    Mention m;
    m.mention_id = "m" + std::to_string(topic.mentions.size());
    m.doc_id = doc_id;
    m.start = start;
    m.end = end;
    m.surface = span_surface(topic.documents[doc_index[doc_id]], start, end);
    topic.mentions.push_back(std::move(m));
  }
  return topic;
}

}  // namespace hiercoref
