#include "hiercoref/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "hiercoref/graph.hpp"

namespace hiercoref {

const Document* Topic::find_document(const std::string& doc_id) const {
  for (const auto& d : documents) {
    if (d.doc_id == doc_id) return &d;
  }
  return nullptr;
}

const Mention* Topic::find_mention(const std::string& mention_id) const {
  for (const auto& m : mentions) {
    if (m.mention_id == mention_id) return &m;
  }
  return nullptr;
}

std::pair<std::string, std::string> ScoreTable::pair_key(const std::string& a,
                                                         const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

bool ScoreTable::has(const std::string& a, const std::string& b) const {
  return entries.count(pair_key(a, b)) > 0;
}

double ScoreTable::coref_score(const std::string& a,
                               const std::string& b) const {
  auto it = entries.find(pair_key(a, b));
  if (it == entries.end()) {
    throw ValidationError("score table " + topic_id + ": missing pair (" + a +
                          ", " + b + ")");
  }
  return it->second[0];
}

double ScoreTable::child_prob(const std::string& child,
                              const std::string& parent) const {
  if (kind != ScoreKind::kFourClass) {
    throw ValidationError("score table " + topic_id +
                          ": hierarchy scores need a four-class table");
  }
  auto key = pair_key(child, parent);
  auto it = entries.find(key);
  if (it == entries.end()) {
    throw ValidationError("score table " + topic_id + ": missing pair (" +
                          child + ", " + parent + ")");
  }
  // Stored orientation is (key.first, key.second); slot 1 is
  // "first parent of second", slot 2 the reverse.
  return key.first == child ? it->second[2] : it->second[1];
}

const std::vector<double>* EmbeddingTable::find(
    const std::string& surface) const {
  auto it = entries.find(surface);
  return it == entries.end() ? nullptr : &it->second;
}

std::string span_surface(const Document& doc, int start, int end) {
  std::string out;
  for (int t = start; t < end; ++t) {
    if (t > start) out += ' ';
    out += doc.tokens[t];
  }
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& topic_id, const std::string& what) {
  throw ValidationError("topic " + topic_id + ": " + what);
}

}  // namespace

void validate_topic(const Topic& topic) {
  const std::string& tid = topic.topic_id;
  if (tid.empty()) throw ValidationError("topic with empty topic_id");

  std::unordered_map<std::string, const Document*> docs;
  for (const auto& d : topic.documents) {
    if (d.doc_id.empty()) fail(tid, "document with empty doc_id");
    if (d.tokens.empty()) fail(tid, "document " + d.doc_id + " has no tokens");
    if (!docs.emplace(d.doc_id, &d).second) {
      fail(tid, "duplicate doc_id " + d.doc_id);
    }
  }

  std::unordered_set<std::string> mention_ids;
  std::set<MentionKey> keys;
  for (const auto& m : topic.mentions) {
    if (m.mention_id.empty()) fail(tid, "mention with empty mention_id");
    if (!mention_ids.insert(m.mention_id).second) {
      fail(tid, "duplicate mention_id " + m.mention_id);
    }
    auto it = docs.find(m.doc_id);
    if (it == docs.end()) {
      fail(tid, "mention " + m.mention_id + " references unknown doc " +
                    m.doc_id);
    }
    const int n_tokens = static_cast<int>(it->second->tokens.size());
    if (m.start < 0 || m.start >= m.end || m.end > n_tokens) {
      fail(tid, "mention " + m.mention_id + " has invalid span [" +
                    std::to_string(m.start) + ", " + std::to_string(m.end) +
                    ") in doc " + m.doc_id + " of " +
                    std::to_string(n_tokens) + " tokens");
    }
    if (!keys.insert(m.key()).second) {
      fail(tid, "mention " + m.mention_id + " duplicates span (" + m.doc_id +
                    ", " + std::to_string(m.start) + ", " +
                    std::to_string(m.end) + ")");
    }
  }

  if (!topic.gold) return;
  const ClusterGraph& g = *topic.gold;
  std::unordered_set<std::string> clustered;
  for (std::size_t c = 0; c < g.clusters.size(); ++c) {
    if (g.clusters[c].empty()) {
      fail(tid, "gold cluster " + std::to_string(c) + " is empty");
    }
    for (const auto& id : g.clusters[c]) {
      if (!mention_ids.count(id)) {
        fail(tid, "gold cluster " + std::to_string(c) +
                      " references unknown mention " + id);
      }
      if (!clustered.insert(id).second) {
        fail(tid, "mention " + id + " appears in more than one gold cluster");
      }
    }
  }
  const int n = static_cast<int>(g.clusters.size());
  for (const auto& [p, c] : g.edges) {
    if (p < 0 || p >= n || c < 0 || c >= n) {
      fail(tid, "gold relation (" + std::to_string(p) + ", " +
                    std::to_string(c) + ") out of range");
    }
    if (p == c) fail(tid, "gold self-relation on cluster " + std::to_string(p));
  }
  if (!is_acyclic(n, g.edges)) fail(tid, "gold relations contain a cycle");
}

void validate_score_table(const ScoreTable& table) {
  for (const auto& [key, scores] : table.entries) {
    const std::string pair = "(" + key.first + ", " + key.second + ")";
    if (key.first == key.second) {
      throw ValidationError("score table " + table.topic_id + ": self pair " +
                            pair);
    }
    if (table.kind == ScoreKind::kFourClass) {
      double sum = 0.0;
      for (double s : scores) {
        if (s < 0.0 || s > 1.0) {
          throw ValidationError("score table " + table.topic_id +
                                ": probability out of range for " + pair);
        }
        sum += s;
      }
      if (std::abs(sum - 1.0) > 1e-6) {
        throw ValidationError("score table " + table.topic_id +
                              ": probabilities for " + pair +
                              " sum to " + std::to_string(sum));
      }
    } else if (scores[0] < 0.0 || scores[0] > 1.0) {
      throw ValidationError("score table " + table.topic_id +
                            ": similarity out of range for " + pair);
    }
  }
}

void validate_score_table(const ScoreTable& table, const Topic& topic) {
  validate_score_table(table);
  std::unordered_set<std::string> ids;
  for (const auto& m : topic.mentions) ids.insert(m.mention_id);
  for (const auto& [key, scores] : table.entries) {
    (void)scores;
    for (const auto& id : {key.first, key.second}) {
      if (!ids.count(id)) {
        throw ValidationError("score table " + table.topic_id +
                              ": unknown mention " + id);
      }
    }
  }
}

void validate_embedding_table(const EmbeddingTable& table) {
  if (table.dim <= 0) throw ValidationError("embedding table: dim must be > 0");
  for (const auto& [surface, vec] : table.entries) {
    if (static_cast<int>(vec.size()) != table.dim) {
      throw ValidationError("embedding table: vector for \"" + surface +
                            "\" has length " + std::to_string(vec.size()) +
                            ", expected " + std::to_string(table.dim));
    }
  }
}

}  // namespace hiercoref
