#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hiercoref/graph.hpp"
#include "hiercoref/model.hpp"

namespace hiercoref {

// Lowercase, punctuation stripped, whitespace collapsed, trailing plural
// 's' removed per token (lightweight lemma surrogate). Idempotent.
std::string normalize_surface(std::string_view s);

struct ConceptNode {
  std::string surface;            // canonical representative
  std::set<std::string> tags;     // kb / hypernym-extraction / curated
};

struct ConceptGraph {
  std::vector<ConceptNode> nodes;
  EdgeList edges;  // parent -> child

  int find_node(const std::string& surface) const;
};

// Union of two concept graphs. Nodes unify when their normalized forms are
// equal or edit-similar at `sim_threshold` (single-link closure); the
// lexicographically smallest surface represents each unified group. Edges
// are re-targeted, deduplicated, and self-edges dropped.
ConceptGraph merge_graphs(const ConceptGraph& a, const ConceptGraph& b,
                          double sim_threshold = 0.8);

// One group per parent with children: {parent} + direct children, then the
// curated groups verbatim.
std::vector<std::vector<std::string>> form_groups(
    const ConceptGraph& g,
    const std::vector<std::vector<std::string>>& curated);

struct CorpusEntry {
  std::string surface;
  std::string source;                // corpus tag, e.g. "abstracts" / "fulltext"
  std::string doc_id;                // optional context carrier
  std::vector<std::string> tokens;   // empty -> synthesized from surface
  int start = -1;
  int end = -1;
};

struct MentionCorpus {
  std::vector<CorpusEntry> entries;
};

struct RetrievalConfig {
  int k = 10;
  double min_similarity = 0.8;  // strictly-greater filter
  std::uint64_t seed = 0;       // proportional sampling from the smaller source
};

struct RetrievedMention {
  std::size_t corpus_index = 0;
  double similarity = 0.0;
};

struct RetrievalResult {
  std::vector<RetrievedMention> mentions;
  std::vector<std::string> missing_embeddings;  // concepts skipped
};

// Exact top-k corpus mentions per group concept by cosine similarity,
// filtered at similarity > min_similarity; ties break on surface order.
// When the corpus carries two source tags the smaller source is topped up
// to the larger source's retrieved proportion by seeded uniform sampling,
// capped at k * |group| total.
RetrievalResult retrieve_mentions(const std::vector<std::string>& group,
                                  const MentionCorpus& corpus,
                                  const EmbeddingTable& emb,
                                  const RetrievalConfig& cfg);

double cosine_similarity(const std::vector<double>& a,
                         const std::vector<double>& b);

// Assembles one candidate topic from retrieval output (no gold annotation).
Topic build_candidate_topic(const std::string& topic_id,
                            const MentionCorpus& corpus,
                            const std::vector<RetrievedMention>& retrieved);

}  // namespace hiercoref
