#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hiercoref {

// Input file is malformed (bad JSON, wrong field types).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input parsed but violates a domain invariant.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Identity of a mention for gold/system comparison. Two independently
// produced files refer to the same mention iff these triples are equal;
// mention_id strings are file-local labels.
struct MentionKey {
  std::string doc_id;
  int start = 0;
  int end = 0;
  auto operator<=>(const MentionKey&) const = default;
};

struct Mention {
  std::string mention_id;
  std::string doc_id;
  int start = 0;  // token index, inclusive
  int end = 0;    // token index, exclusive
  std::string surface;  // cache of tokens[start..end)

  MentionKey key() const { return MentionKey{doc_id, start, end}; }
};

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::map<std::string, std::string> metadata;
};

// Disjoint mention clusters plus directed parent->child edges between them.
// Edges are index pairs into `clusters` and must form a DAG.
struct ClusterGraph {
  std::vector<std::vector<std::string>> clusters;  // mention ids
  std::vector<std::pair<int, int>> edges;          // (parent, child)
};

struct Topic {
  std::string topic_id;
  std::vector<Document> documents;
  std::vector<Mention> mentions;
  std::optional<ClusterGraph> gold;
  std::map<std::string, std::string> metadata;

  const Document* find_document(const std::string& doc_id) const;
  const Mention* find_mention(const std::string& mention_id) const;
};

enum class ScoreKind { kCorefOnly, kFourClass };

// Pairwise scores over a topic's mentions. Entries are keyed by the
// lexicographically ordered mention-id pair (m1 < m2). Four-class vectors
// are stored in that orientation as
//   (p_corefer, p_m1_parent_of_m2, p_m2_parent_of_m1, p_unrelated).
// Coref-only tables keep the similarity in slot 0.
struct ScoreTable {
  std::string topic_id;
  ScoreKind kind = ScoreKind::kCorefOnly;
  std::map<std::pair<std::string, std::string>, std::array<double, 4>> entries;

  static std::pair<std::string, std::string> pair_key(const std::string& a,
                                                      const std::string& b);
  bool has(const std::string& a, const std::string& b) const;
  // Coreference similarity for an unordered pair.
  double coref_score(const std::string& a, const std::string& b) const;
  // P(`child` is a child of `parent`); four-class tables only.
  double child_prob(const std::string& child, const std::string& parent) const;
};

struct EmbeddingTable {
  int dim = 0;
  std::map<std::string, std::vector<double>> entries;

  const std::vector<double>* find(const std::string& surface) const;
};

// Joins tokens[start..end) with single spaces.
std::string span_surface(const Document& doc, int start, int end);

// Checks every type invariant; throws ValidationError naming the topic and
// the offending field.
void validate_topic(const Topic& topic);

// Shape checks that need no topic context: self pairs, normalization,
// score ranges. Throws ValidationError.
void validate_score_table(const ScoreTable& table);

// Additionally checks that all referenced mention ids exist in `topic`.
void validate_score_table(const ScoreTable& table, const Topic& topic);

void validate_embedding_table(const EmbeddingTable& table);

}  // namespace hiercoref
