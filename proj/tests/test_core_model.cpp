#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "hiercoref/graph.hpp"
#include "hiercoref/io.hpp"
#include "hiercoref/model.hpp"
#include "test_support.hpp"

using namespace hiercoref;
using namespace testsupport;

namespace {

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "hiercoref_model_tests";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

Topic gold_topic() {
  Topic topic = make_topic(5, "t-gold");
  ClusterGraph g;
  g.clusters = {{"m0", "m1"}, {"m2"}, {"m3", "m4"}};
  g.edges = {{0, 1}, {1, 2}};
  topic.gold = g;
  topic.metadata["curated"] = "true";
  topic.documents[0].metadata["title"] = "a title";
  return topic;
}

}  // namespace

TEST_CASE("topic jsonl round trip is structurally identical") {
  std::string path = temp_path("round_trip.jsonl");
  std::vector<Topic> topics{gold_topic(), make_topic(3, "t-plain")};
  save_topics(topics, path);
  auto loaded = load_topics(path);
  REQUIRE(loaded.size() == 2);
  std::string again = temp_path("round_trip2.jsonl");
  save_topics(loaded, again);
  std::ifstream a(path), b(again);
  std::string line_a, line_b;
  while (std::getline(a, line_a)) {
    REQUIRE(std::getline(b, line_b));
    CHECK(line_a == line_b);
  }
  CHECK(!std::getline(b, line_b));

  CHECK(loaded[0].gold.has_value());
  CHECK(loaded[0].gold->clusters.size() == 3);
  CHECK(loaded[0].gold->edges.size() == 2);
  CHECK(loaded[0].metadata.at("curated") == "true");
  CHECK(loaded[0].mentions[0].surface == "w0");
  CHECK(!loaded[1].gold.has_value());
}

TEST_CASE("round trip holds on random topics") {
  std::mt19937_64 rng(91);
  std::vector<Topic> topics;
  for (int t = 0; t < 25; ++t) {
    int n = 1 + static_cast<int>(rng() % 9);
    Topic topic = make_topic(n, "rt" + std::to_string(t));
    if (rng() % 2) {
      auto groups = random_partition(n, 4, rng);
      ClusterGraph g;
      for (const auto& group : groups) {
        std::vector<std::string> cluster;
        for (int m : group) cluster.push_back("m" + std::to_string(m));
        g.clusters.push_back(std::move(cluster));
      }
      g.edges = random_dag(static_cast<int>(g.clusters.size()), 0.3, rng);
      topic.gold = std::move(g);
    }
    if (rng() % 3 == 0) topic.metadata["curated"] = "true";
    topics.push_back(std::move(topic));
  }
  std::string p1 = temp_path("random_rt1.jsonl");
  std::string p2 = temp_path("random_rt2.jsonl");
  save_topics(topics, p1);
  save_topics(load_topics(p1), p2);
  std::ifstream a(p1), b(p2);
  std::string la, lb;
  while (std::getline(a, la)) {
    REQUIRE(std::getline(b, lb));
    CHECK(la == lb);
  }
}

TEST_CASE("empty file loads as empty topic list") {
  std::string path = temp_path("empty.jsonl");
  write_file(path, "");
  CHECK(load_topics(path).empty());
}

TEST_CASE("duplicate topic ids are rejected") {
  std::string path = temp_path("dupes.jsonl");
  std::string line = topic_to_json_line(make_topic(2, "same"));
  write_file(path, line + "\n" + line + "\n");
  CHECK_THROWS_WITH_AS(load_topics(path), doctest::Contains("duplicate topic"),
                       ValidationError);
}

TEST_CASE("parse errors carry the line number") {
  std::string path = temp_path("bad.jsonl");
  write_file(path, "{\"topic_id\": \"t\"}\nnot json\n");
  CHECK_THROWS_WITH_AS(load_topics(path),
                       doctest::Contains(":1:"), ParseError);
  write_file(path, topic_to_json_line(make_topic(2)) + "\n{broken\n");
  CHECK_THROWS_WITH_AS(load_topics(path),
                       doctest::Contains(":2:"), ParseError);
}

TEST_CASE("invariant violations name the topic and field") {
  Topic topic = make_topic(3, "t-bad");

  SUBCASE("mention end before start") {
    topic.mentions[1].end = 0;
    topic.mentions[1].start = 1;
    CHECK_THROWS_WITH_AS(validate_topic(topic), doctest::Contains("m1"),
                         ValidationError);
  }
  SUBCASE("mention out of document range") {
    topic.mentions[2].end = 99;
    CHECK_THROWS_WITH_AS(validate_topic(topic), doctest::Contains("m2"),
                         ValidationError);
  }
  SUBCASE("unknown document") {
    topic.mentions[0].doc_id = "nope";
    CHECK_THROWS_WITH_AS(validate_topic(topic), doctest::Contains("nope"),
                         ValidationError);
  }
  SUBCASE("duplicate span") {
    topic.mentions[1].start = 0;
    topic.mentions[1].end = 1;
    CHECK_THROWS_AS(validate_topic(topic), ValidationError);
  }
  SUBCASE("cluster references unknown mention") {
    topic.gold = ClusterGraph{{{"mX"}}, {}};
    CHECK_THROWS_WITH_AS(validate_topic(topic), doctest::Contains("mX"),
                         ValidationError);
  }
  SUBCASE("overlapping clusters") {
    topic.gold = ClusterGraph{{{"m0", "m1"}, {"m1"}}, {}};
    CHECK_THROWS_AS(validate_topic(topic), ValidationError);
  }
  SUBCASE("empty cluster") {
    topic.gold = ClusterGraph{{{"m0"}, {}}, {}};
    CHECK_THROWS_AS(validate_topic(topic), ValidationError);
  }
  SUBCASE("edge out of range") {
    topic.gold = ClusterGraph{{{"m0"}, {"m1"}}, {{0, 7}}};
    CHECK_THROWS_AS(validate_topic(topic), ValidationError);
  }
  SUBCASE("self edge") {
    topic.gold = ClusterGraph{{{"m0"}, {"m1"}}, {{1, 1}}};
    CHECK_THROWS_AS(validate_topic(topic), ValidationError);
  }
  SUBCASE("cyclic gold graph") {
    topic.gold = ClusterGraph{{{"m0"}, {"m1"}, {"m2"}}, {{0, 1}, {1, 2}, {2, 0}}};
    CHECK_THROWS_WITH_AS(validate_topic(topic), doctest::Contains("cycle"),
                         ValidationError);
  }
}

TEST_CASE("transitive closure on a chain adds the indirect edge") {
  ClusterGraph g;
  g.clusters = {{"m0"}, {"m1"}, {"m2"}};
  g.edges = {{0, 1}, {1, 2}};
  ClusterGraph closed = transitive_closure(g);
  CHECK(closed.edges == EdgeList{{0, 1}, {0, 2}, {1, 2}});
  CHECK(closed.clusters == g.clusters);
}

TEST_CASE("transitive closure leaves an edgeless graph unchanged") {
  ClusterGraph g;
  g.clusters = {{"m0"}, {"m1"}};
  CHECK(transitive_closure(g).edges.empty());
}

TEST_CASE("transitive closure rejects cycles") {
  CHECK_THROWS_AS(closure_edges(2, {{0, 1}, {1, 0}}), ValidationError);
}

TEST_CASE("closure is idempotent and monotone on random dags") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + static_cast<int>(rng() % 9);
    EdgeList edges = random_dag(n, 0.3, rng);
    EdgeList closed = closure_edges(n, edges);
    CHECK(closure_edges(n, closed) == closed);
    EdgeList sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    CHECK(std::includes(closed.begin(), closed.end(), sorted.begin(),
                        sorted.end()));
  }
}

TEST_CASE("acyclicity agrees with brute-force cycle search") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + static_cast<int>(rng() % 10);
    EdgeList edges;
    int m = static_cast<int>(rng() % (2 * n + 1));
    for (int e = 0; e < m; ++e) {
      int u = static_cast<int>(rng() % n);
      int v = static_cast<int>(rng() % n);
      if (u != v) edges.emplace_back(u, v);
    }
    CHECK(is_acyclic(n, edges) == !oracle::has_cycle(n, edges));
  }
}

TEST_CASE("transitive reduction drops edges implied by longer paths") {
  EdgeList reduced = reduction_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  CHECK(reduced == EdgeList{{0, 1}, {1, 2}});
  // Reduction then closure restores the reachability relation.
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + static_cast<int>(rng() % 8);
    EdgeList edges = random_dag(n, 0.4, rng);
    CHECK(closure_edges(n, reduction_edges(n, edges)) ==
          closure_edges(n, edges));
  }
}

TEST_CASE("graph stats: edgeless topic") {
  ClusterGraph g;
  g.clusters = {{"m0"}, {"m1"}, {"m2"}};
  auto stats = topic_graph_stats(g);
  CHECK(stats.components == 3);
  CHECK(stats.max_component_depth == 1);
}

TEST_CASE("graph stats: chain plus isolated cluster") {
  ClusterGraph g;
  g.clusters = {{"m0"}, {"m1"}, {"m2"}, {"m3"}};
  g.edges = {{0, 1}, {1, 2}};
  auto stats = topic_graph_stats(g);
  CHECK(stats.components == 2);
  CHECK(stats.max_component_depth == 3);
}

TEST_CASE("dataset stats aggregates counts and means") {
  Topic a = make_topic(4, "a");
  a.gold = ClusterGraph{{{"m0"}, {"m1"}, {"m2"}, {"m3"}}, {{0, 1}, {1, 2}}};
  Topic b = make_topic(2, "b");
  b.gold = ClusterGraph{{{"m0"}, {"m1"}}, {}};
  auto stats = dataset_stats({a, b});
  CHECK(stats.topics == 2);
  CHECK(stats.documents == 2);
  CHECK(stats.mentions == 6);
  CHECK(stats.clusters == 6);
  CHECK(stats.relations == 2);
  CHECK(stats.mean_components == doctest::Approx(2.0));  // (2 + 2) / 2
  CHECK(stats.mean_max_depth == doctest::Approx(2.0));   // (3 + 1) / 2

  Topic no_gold = make_topic(1, "c");
  CHECK_THROWS_WITH_AS(dataset_stats({no_gold}), doctest::Contains("c"),
                       ValidationError);
}

TEST_CASE("release import: nested tokens, inclusive spans, reduction") {
  std::string path = temp_path("release.jsonl");
  // Clusters 10/20/30; relations carry the transitive edge 10->30.
  write_file(
      path,
      R"({"id": 7, "tokens": [["neural", "nets"], ["deep", "nets", "rock"]], )"
      R"("doc_ids": [100, 200], )"
      R"("mentions": [[0, 0, 1, 10], [1, 0, 1, 20], [1, 2, 2, 30]], )"
      R"("relations": [[10, 20], [20, 30], [10, 30]], )"
      R"("source": "kb", "hard_10": false, "curated": true})"
      "\n");
  auto topics = import_release({path});
  REQUIRE(topics.size() == 1);
  const Topic& t = topics[0];
  CHECK(t.topic_id == "7");
  REQUIRE(t.documents.size() == 2);
  CHECK(t.documents[0].doc_id == "100");
  CHECK(t.documents[1].tokens.size() == 3);
  REQUIRE(t.mentions.size() == 3);
  CHECK(t.mentions[0].surface == "neural nets");  // inclusive end 1 -> [0, 2)
  CHECK(t.mentions[2].surface == "rock");
  REQUIRE(t.gold.has_value());
  CHECK(t.gold->clusters.size() == 3);
  CHECK(t.gold->edges == EdgeList{{0, 1}, {1, 2}});  // 10->30 reduced away
  CHECK(t.metadata.at("source") == "kb");
  CHECK(t.metadata.at("curated") == "true");
  CHECK(t.metadata.at("hard_10") == "false");
}

TEST_CASE("release import: flat tokens with per-token doc ids") {
  std::string path = temp_path("release_flat.jsonl");
  write_file(path,
             R"({"id": "x", "tokens": ["a", "b", "c", "d"], )"
             R"("doc_ids": [1, 1, 2, 2], )"
             R"("mentions": [[1, 0, 0, 0], [2, 2, 3, 1]], "relations": []})"
             "\n");
  auto topics = import_release({path});
  REQUIRE(topics.size() == 1);
  const Topic& t = topics[0];
  REQUIRE(t.documents.size() == 2);
  CHECK(t.documents[0].tokens == std::vector<std::string>{"a", "b"});
  CHECK(t.mentions[0].surface == "a");
  CHECK(t.mentions[1].doc_id == "2");
  CHECK(t.mentions[1].start == 0);  // global offset 2 -> local 0
  CHECK(t.mentions[1].surface == "c d");
}

TEST_CASE("release import error paths") {
  std::string path = temp_path("release_bad.jsonl");
  SUBCASE("relation references unknown cluster") {
    write_file(path,
               R"({"id": 1, "tokens": [["a"]], "doc_ids": [0], )"
               R"("mentions": [[0, 0, 0, 5]], "relations": [[5, 6]]})"
               "\n");
    CHECK_THROWS_AS(import_release({path}), ParseError);
  }
  SUBCASE("cyclic relations") {
    write_file(path,
               R"({"id": 1, "tokens": [["a", "b"]], "doc_ids": [0], )"
               R"("mentions": [[0, 0, 0, 1], [0, 1, 1, 2]], )"
               R"("relations": [[1, 2], [2, 1]]})"
               "\n");
    CHECK_THROWS_WITH_AS(import_release({path}), doctest::Contains("cycle"),
                         ValidationError);
  }
  SUBCASE("flat tokens without aligned doc ids") {
    write_file(path,
               R"({"id": 1, "tokens": ["a", "b"], "doc_ids": [0], )"
               R"("mentions": []})"
               "\n");
    CHECK_THROWS_AS(import_release({path}), ParseError);
  }
}

TEST_CASE("score table load canonicalizes pair orientation") {
  std::string path = temp_path("scores.jsonl");
  // (m2, m1) on disk: class 1 means "m2 parent of m1".
  write_file(
      path,
      R"({"topic_id": "t", "kind": "four-class", )"
      R"("pairs": [{"m1": "m2", "m2": "m1", "scores": [0.1, 0.6, 0.2, 0.1]}]})"
      "\n");
  auto tables = load_score_tables(path);
  REQUIRE(tables.size() == 1);
  const ScoreTable& table = tables[0];
  CHECK(table.kind == ScoreKind::kFourClass);
  CHECK(table.coref_score("m1", "m2") == doctest::Approx(0.1));
  CHECK(table.child_prob("m1", "m2") == doctest::Approx(0.6));
  CHECK(table.child_prob("m2", "m1") == doctest::Approx(0.2));

  std::string again = temp_path("scores2.jsonl");
  save_score_tables(tables, again);
  auto reloaded = load_score_tables(again);
  CHECK(reloaded[0].entries == table.entries);
}

TEST_CASE("score table validation") {
  ScoreTable table;
  table.topic_id = "t";
  table.kind = ScoreKind::kFourClass;
  SUBCASE("self pair") {
    table.entries[{"a", "a"}] = {1.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(validate_score_table(table), ValidationError);
  }
  SUBCASE("unnormalized vector") {
    table.entries[{"a", "b"}] = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_WITH_AS(validate_score_table(table), doctest::Contains("sum"),
                         ValidationError);
  }
  SUBCASE("uniform vector accepted") {
    table.entries[{"a", "b"}] = {0.25, 0.25, 0.25, 0.25};
    CHECK_NOTHROW(validate_score_table(table));
  }
  SUBCASE("similarity out of range") {
    table.kind = ScoreKind::kCorefOnly;
    table.entries[{"a", "b"}] = {1.5, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(validate_score_table(table), ValidationError);
  }
  SUBCASE("unknown mention against a topic") {
    table.entries[{"a", "b"}] = {0.25, 0.25, 0.25, 0.25};
    CHECK_THROWS_WITH_AS(validate_score_table(table, make_topic(2)),
                         doctest::Contains("unknown mention"),
                         ValidationError);
  }
}

TEST_CASE("embedding tables round trip in json and binary") {
  EmbeddingTable table;
  table.dim = 3;
  table.entries["deep learning"] = {0.25, -1.5, 3.0};
  table.entries["neural nets"] = {1.0, 0.0, -0.125};

  std::string jpath = temp_path("emb.json");
  save_embeddings_json(table, jpath);
  EmbeddingTable from_json = load_embeddings(jpath);
  CHECK(from_json.dim == 3);
  CHECK(from_json.entries == table.entries);

  std::string bpath = temp_path("emb.bin");
  save_embeddings_binary(table, bpath);
  EmbeddingTable from_bin = load_embeddings(bpath);
  CHECK(from_bin.entries == table.entries);

  EmbeddingTable bad = table;
  bad.entries["short"] = {1.0};
  CHECK_THROWS_WITH_AS(validate_embedding_table(bad),
                       doctest::Contains("short"), ValidationError);
}
