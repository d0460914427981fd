#include "hiercoref/io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "hiercoref/graph.hpp"

namespace hiercoref {

using nlohmann::json;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  return out;
}

std::string stringify(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

std::map<std::string, std::string> parse_metadata(const json& j) {
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : j.items()) {
    if (value.is_structured()) continue;  // metadata values are scalars
    out[key] = stringify(value);
  }
  return out;
}

json metadata_to_json(const std::map<std::string, std::string>& metadata) {
  json j = json::object();
  for (const auto& [k, v] : metadata) j[k] = v;
  return j;
}

ClusterGraph parse_graph(const json& j) {
  ClusterGraph g;
  for (const auto& cluster : j.at("clusters")) {
    g.clusters.push_back(cluster.get<std::vector<std::string>>());
  }
  if (j.contains("relations")) {
    for (const auto& edge : j.at("relations")) {
      g.edges.emplace_back(edge.at(0).get<int>(), edge.at(1).get<int>());
    }
  }
  return g;
}

void fill_surfaces(Topic* topic) {
  for (auto& m : topic->mentions) {
    const Document* doc = topic->find_document(m.doc_id);
    if (doc != nullptr && m.start >= 0 && m.start < m.end &&
        m.end <= static_cast<int>(doc->tokens.size())) {
      m.surface = span_surface(*doc, m.start, m.end);
    }
  }
}

}  // namespace

Topic topic_from_json_line(const std::string& line) {
  json j = json::parse(line);
  Topic topic;
  topic.topic_id = stringify(j.at("topic_id"));
  for (const auto& jd : j.at("documents")) {
    Document doc;
    doc.doc_id = stringify(jd.at("doc_id"));
    doc.tokens = jd.at("tokens").get<std::vector<std::string>>();
    if (jd.contains("metadata")) doc.metadata = parse_metadata(jd["metadata"]);
    topic.documents.push_back(std::move(doc));
  }
  for (const auto& jm : j.at("mentions")) {
    Mention m;
    m.mention_id = stringify(jm.at("mention_id"));
    m.doc_id = stringify(jm.at("doc_id"));
    m.start = jm.at("start").get<int>();
    m.end = jm.at("end").get<int>();
    topic.mentions.push_back(std::move(m));
  }
  if (j.contains("clusters")) {
    topic.gold = parse_graph(j);
  } else if (j.contains("relations")) {
    throw ParseError("topic " + topic.topic_id +
                     ": relations without clusters");
  }
  if (j.contains("metadata")) topic.metadata = parse_metadata(j["metadata"]);
  fill_surfaces(&topic);
  return topic;
}

std::string topic_to_json_line(const Topic& topic) {
  json j;
  j["topic_id"] = topic.topic_id;
  j["documents"] = json::array();
  for (const auto& doc : topic.documents) {
    json jd;
    jd["doc_id"] = doc.doc_id;
    jd["tokens"] = doc.tokens;
    if (!doc.metadata.empty()) jd["metadata"] = metadata_to_json(doc.metadata);
    j["documents"].push_back(std::move(jd));
  }
  j["mentions"] = json::array();
  for (const auto& m : topic.mentions) {
    json jm;
    jm["mention_id"] = m.mention_id;
    jm["doc_id"] = m.doc_id;
    jm["start"] = m.start;
    jm["end"] = m.end;
    j["mentions"].push_back(std::move(jm));
  }
  if (topic.gold) {
    j["clusters"] = topic.gold->clusters;
    json relations = json::array();
    for (const auto& [p, c] : topic.gold->edges) {
      relations.push_back(json::array({p, c}));
    }
    j["relations"] = std::move(relations);
  }
  if (!topic.metadata.empty()) j["metadata"] = metadata_to_json(topic.metadata);
  return j.dump();
}

std::vector<Topic> load_topics(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<Topic> topics;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    Topic topic;
    try {
      topic = topic_from_json_line(line);
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    validate_topic(topic);
    if (!ids.insert(topic.topic_id).second) {
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": duplicate topic " + topic.topic_id);
    }
    topics.push_back(std::move(topic));
  }
  return topics;
}

void save_topics(const std::vector<Topic>& topics, const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& t : topics) out << topic_to_json_line(t) << '\n';
}

std::vector<ScoreTable> load_score_tables(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<ScoreTable> tables;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    ScoreTable table;
    try {
      json j = json::parse(line);
      table.topic_id = stringify(j.at("topic_id"));
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "coref-only") {
        table.kind = ScoreKind::kCorefOnly;
      } else if (kind == "four-class") {
        table.kind = ScoreKind::kFourClass;
      } else {
        throw ParseError("unknown score kind \"" + kind + "\"");
      }
      for (const auto& jp : j.at("pairs")) {
        std::string m1 = stringify(jp.at("m1"));
        std::string m2 = stringify(jp.at("m2"));
        auto scores = jp.at("scores").get<std::vector<double>>();
        const std::size_t expected =
            table.kind == ScoreKind::kFourClass ? 4 : 1;
        if (scores.size() != expected) {
          throw ParseError("pair (" + m1 + ", " + m2 + ") carries " +
                           std::to_string(scores.size()) + " scores, expected " +
                           std::to_string(expected));
        }
        if (m1 == m2) {
          throw ValidationError("score table " + table.topic_id +
                                ": self pair (" + m1 + ")");
        }
        std::array<double, 4> entry{0.0, 0.0, 0.0, 0.0};
        std::copy(scores.begin(), scores.end(), entry.begin());
        if (m1 > m2) {
          std::swap(m1, m2);
          if (table.kind == ScoreKind::kFourClass) {
            std::swap(entry[1], entry[2]);  // parent direction flips with order
          }
        }
        if (!table.entries.emplace(std::make_pair(m1, m2), entry).second) {
          throw ValidationError("score table " + table.topic_id +
                                ": duplicate pair (" + m1 + ", " + m2 + ")");
        }
      }
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    validate_score_table(table);
    tables.push_back(std::move(table));
  }
  return tables;
}

void save_score_tables(const std::vector<ScoreTable>& tables,
                       const std::string& path) {
  std::ofstream out = open_output(path);
  for (const auto& table : tables) {
    json j;
    j["topic_id"] = table.topic_id;
    j["kind"] =
        table.kind == ScoreKind::kFourClass ? "four-class" : "coref-only";
    json pairs = json::array();
    for (const auto& [key, scores] : table.entries) {
      json jp;
      jp["m1"] = key.first;
      jp["m2"] = key.second;
      if (table.kind == ScoreKind::kFourClass) {
        jp["scores"] = std::vector<double>(scores.begin(), scores.end());
      } else {
        jp["scores"] = std::vector<double>{scores[0]};
      }
      pairs.push_back(std::move(jp));
    }
    j["pairs"] = std::move(pairs);
    out << j.dump() << '\n';
  }
}

// --- embeddings ------------------------------------------------------------

namespace {
constexpr char kEmbeddingMagic[8] = {'E', 'M', 'B', 'T', 'B', 'L', '0', '1'};
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in = open_input(path);
  char magic[8] = {0};
  in.read(magic, sizeof(magic));
  EmbeddingTable table;
  if (in.gcount() == 8 && std::memcmp(magic, kEmbeddingMagic, 8) == 0) {
    std::uint32_t dim = 0;
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in) throw ParseError(path + ": truncated embedding header");
    table.dim = static_cast<int>(dim);
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint32_t len = 0;
      in.read(reinterpret_cast<char*>(&len), sizeof(len));
      std::string surface(len, '\0');
      in.read(surface.data(), len);
      std::vector<double> vec(dim);
      in.read(reinterpret_cast<char*>(vec.data()),
              static_cast<std::streamsize>(dim * sizeof(double)));
      if (!in) {
        throw ParseError(path + ": truncated embedding entry " +
                         std::to_string(i));
      }
      table.entries[surface] = std::move(vec);
    }
  } else {
    in.clear();
    in.seekg(0);
    json j;
    try {
      in >> j;
      table.dim = j.at("dim").get<int>();
      for (const auto& je : j.at("entries")) {
        table.entries[stringify(je.at("surface"))] =
            je.at("vector").get<std::vector<double>>();
      }
    } catch (const json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  validate_embedding_table(table);
  return table;
}

void save_embeddings_json(const EmbeddingTable& table,
                          const std::string& path) {
  std::ofstream out = open_output(path);
  json j;
  j["dim"] = table.dim;
  json entries = json::array();
  for (const auto& [surface, vec] : table.entries) {
    json je;
    je["surface"] = surface;
    je["vector"] = vec;
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  out << j.dump() << '\n';
}

void save_embeddings_binary(const EmbeddingTable& table,
                            const std::string& path) {
  std::ofstream out = open_output(path);
  out.write(kEmbeddingMagic, sizeof(kEmbeddingMagic));
  const auto dim = static_cast<std::uint32_t>(table.dim);
  const auto count = static_cast<std::uint64_t>(table.entries.size());
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (const auto& [surface, vec] : table.entries) {
    const auto len = static_cast<std::uint32_t>(surface.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(surface.data(), len);
    out.write(reinterpret_cast<const char*>(vec.data()),
              static_cast<std::streamsize>(vec.size() * sizeof(double)));
  }
}

// --- release import ---------------------------------------------------------

namespace {

Topic import_topic(const json& j, const ImportOptions& opts) {
  Topic topic;
  topic.topic_id = stringify(j.at("id"));

  const json& tokens = j.at("tokens");
  std::vector<std::vector<std::string>> doc_tokens;
  std::vector<std::string> doc_names;
  std::map<std::string, int> name_to_index;
  std::vector<int> flat_doc_start;  // flat variant: global offset per doc

  const bool nested = !tokens.empty() && tokens.at(0).is_array();
  if (nested) {
    for (const auto& doc : tokens) {
      doc_tokens.push_back(doc.get<std::vector<std::string>>());
    }
    if (j.contains("doc_ids")) {
      for (const auto& id : j.at("doc_ids")) doc_names.push_back(stringify(id));
    }
  } else {
    // Flat token list: doc_ids assigns a document to every token.
    if (!j.contains("doc_ids") ||
        j.at("doc_ids").size() != tokens.size()) {
      throw ParseError("topic " + topic.topic_id +
                       ": flat tokens need per-token doc_ids");
    }
    const json& ids = j.at("doc_ids");
    std::string current;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      std::string name = stringify(ids.at(t));
      if (doc_tokens.empty() || name != current) {
        doc_names.push_back(name);
        doc_tokens.emplace_back();
        flat_doc_start.push_back(static_cast<int>(t));
        current = name;
      }
      doc_tokens.back().push_back(tokens.at(t).get<std::string>());
    }
  }
  if (doc_names.empty()) {
    for (std::size_t d = 0; d < doc_tokens.size(); ++d) {
      doc_names.push_back(std::to_string(d));
    }
  }
  if (doc_names.size() != doc_tokens.size()) {
    throw ParseError("topic " + topic.topic_id +
                     ": doc_ids and tokens disagree on document count");
  }
  for (std::size_t d = 0; d < doc_tokens.size(); ++d) {
    Document doc;
    doc.doc_id = doc_names[d];
    doc.tokens = std::move(doc_tokens[d]);
    topic.documents.push_back(std::move(doc));
    name_to_index[doc_names[d]] = static_cast<int>(d);
  }

  // Per-document metadata: an array aligned with the documents.
  if (j.contains("metadata") && j.at("metadata").is_array() &&
      j.at("metadata").size() == topic.documents.size()) {
    const json& meta = j.at("metadata");
    for (std::size_t d = 0; d < topic.documents.size(); ++d) {
      if (meta.at(d).is_object()) {
        topic.documents[d].metadata = parse_metadata(meta.at(d));
      }
    }
  }

  // Mentions: [doc, start, end, cluster_id].
  std::map<long long, std::vector<std::string>> clusters_by_id;
  for (const auto& jm : j.at("mentions")) {
    if (jm.size() < 4) {
      throw ParseError("topic " + topic.topic_id +
                       ": mention record needs 4 fields");
    }
    Mention m;
    m.mention_id = "m" + std::to_string(topic.mentions.size());
    int start = jm.at(1).get<int>();
    int end = jm.at(2).get<int>();
    if (opts.inclusive_ends) end += 1;

    if (nested) {
      std::string doc_ref = stringify(jm.at(0));
      auto it = name_to_index.find(doc_ref);
      int d = it != name_to_index.end() ? it->second : -1;
      if (d < 0 && jm.at(0).is_number()) {
        int idx = jm.at(0).get<int>();
        if (idx >= 0 && idx < static_cast<int>(topic.documents.size()))
          d = idx;
      }
      if (d < 0) {
        throw ParseError("topic " + topic.topic_id +
                         ": mention references unknown document " + doc_ref);
      }
      m.doc_id = topic.documents[d].doc_id;
    } else {
      // Flat offsets: locate the document containing the span start.
      int d = static_cast<int>(std::upper_bound(flat_doc_start.begin(),
                                                flat_doc_start.end(), start) -
                               flat_doc_start.begin()) -
              1;
      if (d < 0) {
        throw ParseError("topic " + topic.topic_id +
                         ": mention offset before first document");
      }
      m.doc_id = topic.documents[d].doc_id;
      start -= flat_doc_start[d];
      end -= flat_doc_start[d];
    }
    m.start = start;
    m.end = end;
    clusters_by_id[jm.at(3).get<long long>()].push_back(m.mention_id);
    topic.mentions.push_back(std::move(m));
  }

  ClusterGraph gold;
  std::map<long long, int> cluster_index;
  for (const auto& [cid, members] : clusters_by_id) {
    cluster_index[cid] = static_cast<int>(gold.clusters.size());
    gold.clusters.push_back(members);
  }
  if (j.contains("relations")) {
    for (const auto& edge : j.at("relations")) {
      long long p = edge.at(0).get<long long>();
      long long c = edge.at(1).get<long long>();
      auto pit = cluster_index.find(p);
      auto cit = cluster_index.find(c);
      if (pit == cluster_index.end() || cit == cluster_index.end()) {
        throw ParseError("topic " + topic.topic_id +
                         ": relation references unknown cluster " +
                         std::to_string(pit == cluster_index.end() ? p : c));
      }
      gold.edges.emplace_back(pit->second, cit->second);
    }
  }
  // Store direct edges only; drop anything implied by a longer path.
  try {
    gold.edges = reduction_edges(static_cast<int>(gold.clusters.size()),
                                 gold.edges);
  } catch (const ValidationError&) {
    throw ValidationError("topic " + topic.topic_id +
                          ": gold relations contain a cycle");
  }
  topic.gold = std::move(gold);

  for (const char* flag : {"source", "hard_10", "hard_20", "curated"}) {
    if (j.contains(flag) && !j.at(flag).is_structured()) {
      topic.metadata[flag] = stringify(j.at(flag));
    }
  }
  fill_surfaces(&topic);
  return topic;
}

}  // namespace

std::vector<Topic> import_release(const std::vector<std::string>& paths,
                                  const ImportOptions& opts) {
  std::vector<Topic> topics;
  std::set<std::string> ids;
  for (const auto& path : paths) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() ||
          line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      Topic topic;
      try {
        topic = import_topic(json::parse(line), opts);
      } catch (const json::exception& e) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": " +
                         e.what());
      }
      validate_topic(topic);
      if (!ids.insert(topic.topic_id).second) {
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": duplicate topic " + topic.topic_id);
      }
      topics.push_back(std::move(topic));
    }
  }
  return topics;
}

// --- prep inputs -------------------------------------------------------------

ConceptGraph load_concept_graph(const std::string& path,
                                const std::string& tag) {
  std::ifstream in = open_input(path);
  ConceptGraph g;
  std::map<std::string, int> index;
  auto node = [&](const std::string& surface) {
    auto [it, inserted] = index.emplace(surface, g.nodes.size());
    if (inserted) g.nodes.push_back(ConceptNode{surface, {tag}});
    return it->second;
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      node(line);
      continue;
    }
    std::string parent = line.substr(0, tab);
    std::string child = line.substr(tab + 1);
    if (parent.empty() || child.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": empty concept name");
    }
    int p = node(parent), c = node(child);
    if (p != c) g.edges.emplace_back(p, c);
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return g;
}

std::vector<std::vector<std::string>> load_groups(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<std::string>> groups;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> group;
    std::stringstream ss(line);
    std::string concept_name;
    while (std::getline(ss, concept_name, '\t')) {
      if (!concept_name.empty()) group.push_back(concept_name);
    }
    if (!group.empty()) groups.push_back(std::move(group));
  }
  return groups;
}

MentionCorpus load_corpus_mentions(const std::string& path) {
  std::ifstream in = open_input(path);
  MentionCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      json j = json::parse(line);
      CorpusEntry entry;
      entry.surface = j.at("surface").get<std::string>();
      if (j.contains("source")) entry.source = stringify(j.at("source"));
      if (j.contains("doc_id")) entry.doc_id = stringify(j.at("doc_id"));
      if (j.contains("tokens")) {
        entry.tokens = j.at("tokens").get<std::vector<std::string>>();
        entry.start = j.value("start", -1);
        entry.end = j.value("end", -1);
      }
      if (entry.surface.empty()) {
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": empty surface");
      }
      corpus.entries.push_back(std::move(entry));
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

std::vector<std::pair<std::string, double>> load_topic_scores(
    const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::pair<std::string, double>> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      json j = json::parse(line);
      if (!j.contains("topic_id")) continue;  // aggregate rows are skipped
      double value = 0.0;
      if (j.contains("score")) {
        value = j.at("score").get<double>();
      } else if (j.contains("conll")) {
        value = j.at("conll").get<double>();
      } else {
        continue;
      }
      scores.emplace_back(stringify(j.at("topic_id")), value);
    } catch (const json::exception& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return scores;
}

}  // namespace hiercoref
