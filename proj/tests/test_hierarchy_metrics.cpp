#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hiercoref/hierarchy_metrics.hpp"
#include "test_support.hpp"

using namespace hiercoref;
using namespace testsupport;

namespace {

constexpr double kTol = 1e-9;

// Random instance over a shared mention set: both sides cluster the same
// mentions, each with its own DAG.
EvalGraph random_graph(int mentions, int max_clusters, double edge_prob,
                       std::mt19937_64& rng) {
  auto groups = random_partition(mentions, max_clusters, rng);
  EdgeList edges = random_dag(static_cast<int>(groups.size()), edge_prob, rng);
  return to_eval_graph(groups, edges);
}

}  // namespace

TEST_CASE("hierarchy score rewards a shared parent-child mention pair") {
  // Gold: {0,1} -> {2}; system splits the child cluster differently but one
  // system edge still covers the gold pair (0, 2).
  EvalGraph gold = to_eval_graph({{0, 1}, {2, 3}}, {{0, 1}});
  EvalGraph sys = to_eval_graph({{0}, {2}, {1, 3}}, {{0, 1}});
  auto matches = hierarchy_matches(sys, gold, Overlap::kAnyPair);
  REQUIRE(matches.size() == 1);
  CHECK(matches[0].matched);
  REQUIRE(matches[0].witness.has_value());
  CHECK(matches[0].witness->first == key_of(0));
  CHECK(matches[0].witness->second == key_of(2));

  auto result = hierarchy_score(gold, sys, Overlap::kAnyPair);
  CHECK(result.prf.precision == doctest::Approx(1.0));
  CHECK(result.prf.recall == doctest::Approx(1.0));  // gold edge matched back
}

TEST_CASE("identical graphs score 1.0 under both overlap modes") {
  EvalGraph g = to_eval_graph({{0, 1}, {2}, {3, 4}}, {{0, 1}, {1, 2}});
  for (auto overlap : {Overlap::kAnyPair, Overlap::kHalf}) {
    auto result = hierarchy_score(g, g, overlap);
    CHECK(result.prf.recall == doctest::Approx(1.0));
    CHECK(result.prf.precision == doctest::Approx(1.0));
    CHECK(result.prf.f1 == doctest::Approx(1.0));
  }
}

TEST_CASE("closure turns a grandparent link into a true positive") {
  // Gold chain A -> B -> C; the system has one edge linking A-mentions
  // above C-mentions directly.
  EvalGraph gold = to_eval_graph({{0}, {1}, {2}}, {{0, 1}, {1, 2}});
  EvalGraph sys = to_eval_graph({{0}, {1}, {2}}, {{0, 2}});
  auto result = hierarchy_score(gold, sys, Overlap::kAnyPair);
  CHECK(result.prf.precision == doctest::Approx(1.0));
  // Gold closure has 3 edges; the system edge covers only A -> C.
  CHECK(result.prf.recall == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("an unsupported system edge is a precision error") {
  EvalGraph gold = to_eval_graph({{0}, {1}, {2}}, {{0, 1}});
  EvalGraph sys = to_eval_graph({{0}, {1}, {2}}, {{1, 2}});
  auto result = hierarchy_score(gold, sys, Overlap::kAnyPair);
  CHECK(result.prf.precision == doctest::Approx(0.0));
  CHECK(result.prf.recall == doctest::Approx(0.0));
}

TEST_CASE("half overlap needs witnesses over half the pair product") {
  // System edge {0,1} -> {2,3}: 4 mention pairs. Gold supports only (0, 2):
  // 1 of 4 pairs -> any-pair matches, half does not.
  EvalGraph gold = to_eval_graph({{0}, {2}, {1, 3}}, {{0, 1}});
  EvalGraph sys = to_eval_graph({{0, 1}, {2, 3}}, {{0, 1}});
  CHECK(hierarchy_score(gold, sys, Overlap::kAnyPair).prf.precision ==
        doctest::Approx(1.0));
  CHECK(hierarchy_score(gold, sys, Overlap::kHalf).prf.precision ==
        doctest::Approx(0.0));

  // Gold supporting (0,2) and (0,3): 2 of 4 pairs reaches the 50% bar.
  EvalGraph gold_half = to_eval_graph({{0}, {2, 3}, {1}}, {{0, 1}});
  CHECK(hierarchy_score(gold_half, sys, Overlap::kHalf).prf.precision ==
        doctest::Approx(1.0));
}

TEST_CASE("no edges on either side scores 1.0") {
  EvalGraph a = to_eval_graph({{0, 1}, {2}}, {});
  EvalGraph b = to_eval_graph({{0}, {1, 2}}, {});
  auto result = hierarchy_score(a, b, Overlap::kAnyPair);
  CHECK(result.prf.f1 == doctest::Approx(1.0));

  EvalGraph with_edge = to_eval_graph({{0, 1}, {2}}, {{0, 1}});
  auto one_sided = hierarchy_score(with_edge, b, Overlap::kAnyPair);
  CHECK(one_sided.prf.precision == doctest::Approx(1.0));  // vacuous
  CHECK(one_sided.prf.recall == doctest::Approx(0.0));
  CHECK(one_sided.prf.f1 == doctest::Approx(0.0));
}

TEST_CASE("hierarchy score rejects cyclic input") {
  EvalGraph cyclic = to_eval_graph({{0}, {1}}, {{0, 1}, {1, 0}});
  EvalGraph ok = to_eval_graph({{0}, {1}}, {});
  CHECK_THROWS_AS(hierarchy_score(cyclic, ok, Overlap::kAnyPair),
                  ValidationError);
}

TEST_CASE("swap symmetry and half-dominance on random instances") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    int mentions = 3 + static_cast<int>(rng() % 8);
    EvalGraph a = random_graph(mentions, 5, 0.4, rng);
    EvalGraph b = random_graph(mentions, 5, 0.4, rng);

    auto any_ab = hierarchy_score(a, b, Overlap::kAnyPair);
    auto any_ba = hierarchy_score(b, a, Overlap::kAnyPair);
    CHECK(any_ab.prf.recall ==
          doctest::Approx(any_ba.prf.precision).epsilon(kTol));
    CHECK(any_ab.prf.precision ==
          doctest::Approx(any_ba.prf.recall).epsilon(kTol));

    auto half_ab = hierarchy_score(a, b, Overlap::kHalf);
    CHECK(half_ab.prf.f1 <= any_ab.prf.f1 + kTol);

    CHECK(path_distance_score(a, b).score ==
          doctest::Approx(path_distance_score(b, a).score).epsilon(kTol));
  }
}

TEST_CASE("cluster distances") {
  EvalGraph chain = to_eval_graph({{0, 1}, {2}, {3}}, {{0, 1}, {1, 2}});
  SUBCASE("same cluster is 0") {
    CHECK(cluster_distance(chain, key_of(0), key_of(1)) == 0);
  }
  SUBCASE("direct parent-child is 1") {
    CHECK(cluster_distance(chain, key_of(0), key_of(2)) == 1);
  }
  SUBCASE("grandparent chain is 2, both directions") {
    CHECK(cluster_distance(chain, key_of(0), key_of(3)) == 2);
    CHECK(cluster_distance(chain, key_of(3), key_of(0)) == 2);
  }
  SUBCASE("siblings are disconnected") {
    EvalGraph tree = to_eval_graph({{0}, {1}, {2}}, {{0, 1}, {0, 2}});
    CHECK(!cluster_distance(tree, key_of(1), key_of(2)).has_value());
  }
  SUBCASE("unclustered mention is an error") {
    CHECK_THROWS_AS(cluster_distance(chain, key_of(0), key_of(9)),
                    ValidationError);
  }
}

TEST_CASE("path score worked ratios") {
  SUBCASE("coreference against parent-child contributes 1/2") {
    EvalGraph gold = to_eval_graph({{0, 1}}, {});
    EvalGraph sys = to_eval_graph({{0}, {1}}, {{0, 1}});
    auto score = path_distance_score(gold, sys);
    CHECK(score.pair_count == 1);
    CHECK(score.score == doctest::Approx(0.5));
  }
  SUBCASE("identical graphs score 1") {
    EvalGraph g = to_eval_graph({{0, 1}, {2}}, {{0, 1}});
    CHECK(path_distance_score(g, g).score == doctest::Approx(1.0));
  }
  SUBCASE("pair connected only in gold contributes 0") {
    EvalGraph gold = to_eval_graph({{0}, {1}}, {{0, 1}});
    EvalGraph sys = to_eval_graph({{0}, {1}}, {});
    auto score = path_distance_score(gold, sys);
    CHECK(score.pair_count == 1);
    CHECK(score.score == doctest::Approx(0.0));
  }
  SUBCASE("distances 2 and 4 contribute 3/5") {
    EvalGraph gold =
        to_eval_graph({{0}, {1}, {2}, {3}, {4}}, {{0, 1}, {1, 4}});
    EvalGraph sys = to_eval_graph({{0}, {1}, {2}, {3}, {4}},
                                  {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    // Only the (0, 4) endpoints: gold distance 2, system distance 4.
    auto dg = cluster_distance(gold, key_of(0), key_of(4));
    auto ds = cluster_distance(sys, key_of(0), key_of(4));
    REQUIRE(dg == 2);
    REQUIRE(ds == 4);
    double got = (std::min(*dg, *ds) + 1.0) / (std::max(*dg, *ds) + 1.0);
    CHECK(got == doctest::Approx(0.6));
  }
  SUBCASE("no connected pairs anywhere scores 1") {
    EvalGraph a = to_eval_graph({{0}, {1}}, {});
    EvalGraph b = to_eval_graph({{0}, {1}}, {});
    auto score = path_distance_score(a, b);
    CHECK(score.pair_count == 0);
    CHECK(score.score == doctest::Approx(1.0));
  }
}

TEST_CASE("path score matches the exhaustive oracle on random instances") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    int mentions = 2 + static_cast<int>(rng() % 11);  // up to 12
    EvalGraph gold = random_graph(mentions, 6, 0.35, rng);
    EvalGraph sys = random_graph(mentions, 6, 0.35, rng);
    double got = path_distance_score(gold, sys).score;
    double want = oracle::path_score(gold, sys);
    CHECK(got == doctest::Approx(want).epsilon(kTol));
  }
}

TEST_CASE("cluster_distance agrees with exhaustive path search") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    int mentions = 2 + static_cast<int>(rng() % 8);
    EvalGraph g = random_graph(mentions, 5, 0.4, rng);
    for (int a = 0; a < mentions; ++a) {
      for (int b = a + 1; b < mentions; ++b) {
        auto got = cluster_distance(g, key_of(a), key_of(b));
        auto want = oracle::chain_distance(g, key_of(a), key_of(b));
        CHECK(got == want);
        CHECK(got == cluster_distance(g, key_of(b), key_of(a)));
      }
    }
  }
}

TEST_CASE("matched flag and witness are consistent") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    int mentions = 3 + static_cast<int>(rng() % 6);
    EvalGraph a = random_graph(mentions, 4, 0.5, rng);
    EvalGraph b = random_graph(mentions, 4, 0.5, rng);
    for (auto overlap : {Overlap::kAnyPair, Overlap::kHalf}) {
      for (const auto& m : hierarchy_matches(a, b, overlap)) {
        CHECK(m.matched == m.witness.has_value());
      }
    }
  }
}
