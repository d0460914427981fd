#pragma once

#include <string>
#include <vector>

#include "hiercoref/candidate_prep.hpp"
#include "hiercoref/model.hpp"

namespace hiercoref {

// Canonical topic records, one JSON object per line (see README "File
// formats"). Every topic is validated; errors carry the line number or the
// topic id.
std::vector<Topic> load_topics(const std::string& path);
void save_topics(const std::vector<Topic>& topics, const std::string& path);

std::string topic_to_json_line(const Topic& topic);
Topic topic_from_json_line(const std::string& line);

std::vector<ScoreTable> load_score_tables(const std::string& path);
void save_score_tables(const std::vector<ScoreTable>& tables,
                       const std::string& path);

// JSON table or the binary row-major variant (auto-detected by magic).
EmbeddingTable load_embeddings(const std::string& path);
void save_embeddings_json(const EmbeddingTable& table, const std::string& path);
void save_embeddings_binary(const EmbeddingTable& table,
                            const std::string& path);

// Upstream release import: per-line records with nested (or flat) token
// lists, [doc, start, end, cluster_id] mention quadruples and
// [parent, child] cluster-id relations. Gold relations are stored as their
// transitive reduction; closure is recomputed at evaluation time.
struct ImportOptions {
  bool inclusive_ends = true;  // release spans use inclusive end indices
};

std::vector<Topic> import_release(const std::vector<std::string>& paths,
                                  const ImportOptions& opts = {});

// prep inputs -------------------------------------------------------------

// One edge per line: "parent<TAB>child"; a line with a single column
// declares an isolated node. Blank lines and #-comments are skipped.
ConceptGraph load_concept_graph(const std::string& path,
                                const std::string& tag);

// One curated group per line, concepts separated by tabs.
std::vector<std::vector<std::string>> load_groups(const std::string& path);

// JSONL: {"surface": ..., "source": ..., "doc_id"?, "tokens"?, "start"?, "end"?}
MentionCorpus load_corpus_mentions(const std::string& path);

// JSONL: {"topic_id": ..., "score": F} (or "conll" in place of "score").
std::vector<std::pair<std::string, double>> load_topic_scores(
    const std::string& path);

}  // namespace hiercoref
