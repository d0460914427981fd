#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hiercoref/agreement.hpp"
#include "hiercoref/baseline.hpp"
#include "hiercoref/candidate_prep.hpp"
#include "hiercoref/graph.hpp"
#include "hiercoref/inference.hpp"
#include "hiercoref/io.hpp"
#include "hiercoref/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hiercoref;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalidInput = 2;

std::vector<double> parse_fractions(const std::string& spec) {
  std::vector<double> fractions;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      double f = std::stod(item, &used);
      if (used != item.size() || f < 0.0 || f > 1.0) {
        throw std::invalid_argument(item);
      }
      fractions.push_back(f);
    } catch (const std::exception&) {
      throw ValidationError("bad fraction \"" + item + "\"");
    }
  }
  return fractions;
}

std::vector<double> parse_grid(const std::string& spec) {
  // "lo:hi:step"
  double lo = 0.0, hi = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::stringstream ss(spec);
  if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
      step <= 0.0 || hi < lo) {
    throw ValidationError("bad grid \"" + spec + "\", expected lo:hi:step");
  }
  std::vector<double> grid;
  for (double v = lo; v <= hi + 1e-9; v += step) grid.push_back(v);
  return grid;
}

void write_lines(const std::string& path,
                 const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path);
  for (const auto& line : lines) out << line << '\n';
}

struct EvaluateArgs {
  std::string gold_path, system_path, report_path;
  bool per_topic = false;
  bool macro = false;
  bool keep_singletons = false;
  bool closed_paths = false;
  int jobs = 1;
};

int cmd_evaluate(const EvaluateArgs& args) {
  auto gold = load_topics(args.gold_path);
  auto sys = load_topics(args.system_path);
  EvalOptions opts;
  opts.filter_singletons = !args.keep_singletons;
  opts.closed_paths = args.closed_paths;
  opts.jobs = args.jobs;
  auto reports = evaluate_corpus(gold, sys, opts);
  std::vector<AggregateReport> totals{micro_aggregate(reports)};
  if (args.macro) totals.push_back(macro_aggregate(reports));
  std::cout << render_report_table(reports, totals, args.per_topic);
  if (!args.report_path.empty()) {
    std::vector<std::string> lines;
    for (const auto& r : reports) lines.push_back(report_to_json_line(r));
    for (const auto& t : totals) lines.push_back(aggregate_to_json_line(t));
    write_lines(args.report_path, lines);
  }
  return kExitOk;
}

struct InferArgs {
  std::string input_path, scores, output_path;
  double cluster_threshold = 0.6;
  double hierarchy_threshold = 0.4;
  bool single_parent = false;
  bool stop_on_cycle = false;
  int jobs = 1;
};

int cmd_infer(const InferArgs& args) {
  auto topics = load_topics(args.input_path);
  ScorerConfig cfg;
  cfg.clustering_threshold = args.cluster_threshold;
  cfg.hierarchy_threshold = args.hierarchy_threshold;
  cfg.single_parent = args.single_parent;
  cfg.stop_on_cycle = args.stop_on_cycle;

  std::map<std::string, const ScoreTable*> tables;
  std::vector<ScoreTable> loaded;
  if (args.scores == "edit") {
    cfg.source = ScorerConfig::Source::kEditDistance;
  } else {
    cfg.source = ScorerConfig::Source::kScoreTable;
    loaded = load_score_tables(args.scores);
    for (const auto& t : loaded) tables[t.topic_id] = &t;
  }

  std::vector<Topic> out(topics.size());
  parallel_for(topics.size(), args.jobs, [&](std::size_t i) {
    const Topic& topic = topics[i];
    const ScoreTable* table = nullptr;
    if (cfg.source == ScorerConfig::Source::kScoreTable) {
      auto it = tables.find(topic.topic_id);
      if (it == tables.end()) {
        throw ValidationError("no score table for topic " + topic.topic_id);
      }
      table = it->second;
    }
    Topic result = topic;
    result.gold = run_pipeline(topic, cfg, table);
    out[i] = std::move(result);
  });
  std::sort(out.begin(), out.end(), [](const Topic& a, const Topic& b) {
    return a.topic_id < b.topic_id;
  });
  save_topics(out, args.output_path);
  return kExitOk;
}

struct BaselineArgs {
  std::string validation_path, test_path, report_path;
  std::optional<double> threshold;
  std::string grid = "0.5:0.95:0.05";
  std::string fractions = "0.1,0.2";
  bool keep_singletons = false;
  int jobs = 1;
};

int cmd_baseline(const BaselineArgs& args) {
  BaselineOptions opts;
  opts.threshold = args.threshold;
  opts.grid = parse_grid(args.grid);
  opts.fractions = parse_fractions(args.fractions);
  opts.eval.filter_singletons = !args.keep_singletons;
  opts.eval.jobs = args.jobs;

  std::vector<Topic> tuning;
  if (!opts.threshold) tuning = load_topics(args.validation_path);
  auto test = load_topics(args.test_path);
  BaselineResult result = run_baseline(tuning, test, opts);

  std::cout << "threshold " << result.threshold << "\n";
  std::cout << render_report_table(result.reports, {result.micro}, false);
  for (const auto& slice : result.slices) {
    std::cout << "bottom " << slice.fraction << " (" << slice.topics.size()
              << " topics): conll " << slice.micro.conll << "\n";
  }
  if (!args.report_path.empty()) {
    std::vector<std::string> lines;
    for (const auto& r : result.reports) lines.push_back(report_to_json_line(r));
    lines.push_back(aggregate_to_json_line(result.micro));
    for (const auto& slice : result.slices) {
      json j;
      j["slice_fraction"] = slice.fraction;
      j["topics"] = slice.topics;
      j["conll"] = slice.micro.conll;
      lines.push_back(j.dump());
    }
    write_lines(args.report_path, lines);
  }
  return kExitOk;
}

struct AgreeArgs {
  std::string annotations_dir;
  std::string metric = "conll";
  std::string overlap = "any";
  bool keep_singletons = false;
  bool global_best_pair = false;
};

int cmd_agree(const AgreeArgs& args) {
  IaaOptions opts;
  if (args.metric == "conll") {
    opts.metric = IaaMetric::kConll;
  } else if (args.metric == "hierarchy") {
    opts.metric = IaaMetric::kHierarchy;
  } else if (args.metric == "path") {
    opts.metric = IaaMetric::kPath;
  } else {
    throw ValidationError("unknown metric " + args.metric);
  }
  opts.overlap = args.overlap == "half" ? Overlap::kHalf : Overlap::kAnyPair;
  opts.filter_singletons = !args.keep_singletons;

  // One canonical topic file per annotator; the stem is the annotator id.
  std::map<std::string, std::vector<Topic>> by_annotator;
  for (const auto& entry : fs::directory_iterator(args.annotations_dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.extension() != ".jsonl" && p.extension() != ".json") continue;
    by_annotator[p.stem().string()] = load_topics(p.string());
  }
  if (by_annotator.size() < 2) {
    throw ValidationError("need at least two annotator files in " +
                          args.annotations_dir);
  }

  std::map<std::string, std::vector<Annotation>> per_topic;
  std::map<std::string, const Topic*> topic_ref;
  for (const auto& [annotator, topics] : by_annotator) {
    for (const auto& t : topics) {
      if (!t.gold) {
        throw ValidationError("annotator " + annotator + " topic " +
                              t.topic_id + " has no clusters");
      }
      per_topic[t.topic_id].push_back(Annotation{annotator, *t.gold});
      topic_ref[t.topic_id] = &t;
    }
  }

  std::vector<PairTopicScore> scores;
  for (const auto& [tid, annotations] : per_topic) {
    if (annotations.size() < 2) continue;
    auto topic_scores =
        pairwise_iaa_scores(annotations, *topic_ref.at(tid), opts);
    scores.insert(scores.end(), topic_scores.begin(), topic_scores.end());
  }
  if (scores.empty()) {
    throw ValidationError("no topic is annotated by two or more annotators");
  }
  IaaSummary summary = iaa_summary(scores, opts.metric, args.global_best_pair);
  json j;
  j["metric"] = args.metric;
  j["pairs"] = scores.size();
  j["avg"] = summary.avg;
  j["max_micro"] = summary.max_micro;
  j["max_macro"] = summary.max_macro;
  std::cout << j.dump() << "\n";
  return kExitOk;
}

struct SliceArgs {
  std::string scores_path;
  std::string fractions = "0.1,0.2";
  std::string topics_path;  // optional, for curated selection
  std::string curated_flag = "curated";
};

int cmd_slice(const SliceArgs& args) {
  auto scores = load_topic_scores(args.scores_path);
  if (scores.empty()) {
    throw ValidationError("no per-topic scores in " + args.scores_path);
  }
  auto fractions = parse_fractions(args.fractions);
  auto slices = diversity_slices(scores, fractions);
  for (std::size_t i = 0; i < slices.size(); ++i) {
    json j;
    j["fraction"] = fractions[i];
    j["topics"] = slices[i];
    std::cout << j.dump() << "\n";
  }
  if (!args.topics_path.empty()) {
    auto topics = load_topics(args.topics_path);
    json j;
    j["flag"] = args.curated_flag;
    j["topics"] = flagged_topics(topics, args.curated_flag);
    std::cout << j.dump() << "\n";
  }
  return kExitOk;
}

struct PrepArgs {
  std::string kb_path, hypernyms_path, curated_path, corpus_path,
      embeddings_path, output_path, stoplist_path;
  int k = 10;
  double min_similarity = 0.8;
  double merge_threshold = 0.8;
  std::uint64_t seed = 0;
};

int cmd_prep(const PrepArgs& args) {
  ConceptGraph kb = load_concept_graph(args.kb_path, "kb");
  ConceptGraph hyp =
      load_concept_graph(args.hypernyms_path, "hypernym-extraction");
  ConceptGraph merged = merge_graphs(kb, hyp, args.merge_threshold);

  if (!args.stoplist_path.empty()) {
    std::set<std::string> stop;
    std::ifstream in(args.stoplist_path);
    if (!in) throw ParseError("cannot open " + args.stoplist_path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) stop.insert(normalize_surface(line));
    }
    ConceptGraph kept;
    std::vector<int> remap(merged.nodes.size(), -1);
    for (std::size_t i = 0; i < merged.nodes.size(); ++i) {
      if (stop.count(normalize_surface(merged.nodes[i].surface))) continue;
      remap[i] = static_cast<int>(kept.nodes.size());
      kept.nodes.push_back(merged.nodes[i]);
    }
    for (const auto& [p, c] : merged.edges) {
      if (remap[p] >= 0 && remap[c] >= 0) {
        kept.edges.emplace_back(remap[p], remap[c]);
      }
    }
    merged = std::move(kept);
  }

  std::vector<std::vector<std::string>> curated;
  if (!args.curated_path.empty()) curated = load_groups(args.curated_path);
  auto groups = form_groups(merged, curated);

  MentionCorpus corpus = load_corpus_mentions(args.corpus_path);
  EmbeddingTable emb = load_embeddings(args.embeddings_path);

  RetrievalConfig cfg;
  cfg.k = args.k;
  cfg.min_similarity = args.min_similarity;
  cfg.seed = args.seed;

  std::vector<Topic> topics;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    RetrievalResult result = retrieve_mentions(groups[g], corpus, emb, cfg);
    for (const auto& missing : result.missing_embeddings) {
      std::cerr << "warning: no embedding for concept \"" << missing
                << "\" (group " << g << ")\n";
    }
    if (result.mentions.empty()) continue;
    char tid[32];
    std::snprintf(tid, sizeof(tid), "t%04zu", g);
    Topic topic = build_candidate_topic(tid, corpus, result.mentions);
    if (topic.mentions.empty()) continue;
    validate_topic(topic);
    topics.push_back(std::move(topic));
  }
  save_topics(topics, args.output_path);
  std::cout << "groups " << groups.size() << " topics " << topics.size()
            << "\n";
  return kExitOk;
}

struct StatsArgs {
  std::vector<std::string> inputs;
  bool as_json = false;
};

int cmd_stats(const StatsArgs& args) {
  std::vector<Topic> all;
  std::vector<std::pair<std::string, DatasetStats>> rows;
  for (const auto& path : args.inputs) {
    auto topics = load_topics(path);
    rows.emplace_back(fs::path(path).filename().string(),
                      dataset_stats(topics));
    all.insert(all.end(), topics.begin(), topics.end());
  }
  if (args.inputs.size() > 1) {
    rows.emplace_back("total", dataset_stats(all));
  }
  for (const auto& [label, s] : rows) {
    if (args.as_json) {
      json j;
      j["split"] = label;
      j["topics"] = s.topics;
      j["documents"] = s.documents;
      j["mentions"] = s.mentions;
      j["clusters"] = s.clusters;
      j["relations"] = s.relations;
      j["mean_components"] = s.mean_components;
      j["mean_max_depth"] = s.mean_max_depth;
      std::cout << j.dump() << "\n";
    } else {
      std::cout << label << ": topics " << s.topics << ", documents "
                << s.documents << ", mentions " << s.mentions << ", clusters "
                << s.clusters << ", relations " << s.relations
                << ", mean components " << s.mean_components
                << ", mean max depth " << s.mean_max_depth << "\n";
    }
  }
  return kExitOk;
}

struct ImportArgs {
  std::vector<std::string> inputs;
  std::string output_path;
  bool exclusive_ends = false;
};

int cmd_import(const ImportArgs& args) {
  ImportOptions opts;
  opts.inclusive_ends = !args.exclusive_ends;
  auto topics = import_release(args.inputs, opts);
  save_topics(topics, args.output_path);
  std::cout << "imported " << topics.size() << " topics\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical cross-document coreference toolkit"};
  app.require_subcommand(1);

  EvaluateArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Score system graphs against gold");
  eval_cmd->add_option("--gold", eval_args.gold_path, "gold topics (jsonl)")
      ->required();
  eval_cmd->add_option("--system", eval_args.system_path, "system topics")
      ->required();
  eval_cmd->add_option("--report", eval_args.report_path,
                       "write per-topic jsonl report");
  eval_cmd->add_flag("--per-topic", eval_args.per_topic,
                     "print one table row per topic");
  eval_cmd->add_flag("--macro", eval_args.macro,
                     "also print per-topic means");
  eval_cmd->add_flag("--keep-singletons", eval_args.keep_singletons,
                     "skip singleton filtering before coref metrics");
  eval_cmd->add_flag("--closed-paths", eval_args.closed_paths,
                     "path distances over the transitive closure");
  eval_cmd->add_option("--jobs", eval_args.jobs, "worker threads");

  InferArgs infer_args;
  auto* infer_cmd =
      app.add_subcommand("infer", "Cluster + hierarchy from pairwise scores");
  infer_cmd->add_option("--input", infer_args.input_path, "topics (jsonl)")
      ->required();
  infer_cmd
      ->add_option("--scores", infer_args.scores,
                   "score table path, or 'edit' for the edit-distance scorer")
      ->required();
  infer_cmd->add_option("--output", infer_args.output_path, "output topics")
      ->required();
  infer_cmd->add_option("--cluster-threshold", infer_args.cluster_threshold,
                        "agglomerative stop threshold");
  infer_cmd->add_option("--hierarchy-threshold",
                        infer_args.hierarchy_threshold,
                        "greedy edge threshold");
  infer_cmd->add_flag("--single-parent", infer_args.single_parent,
                      "tree mode: one parent per cluster");
  infer_cmd->add_flag("--stop-on-cycle", infer_args.stop_on_cycle,
                      "abort edge scan at the first cycle discard");
  infer_cmd->add_option("--jobs", infer_args.jobs, "worker threads");

  BaselineArgs base_args;
  auto* base_cmd = app.add_subcommand(
      "baseline", "Edit-distance clustering baseline, tuned and evaluated");
  base_cmd->add_option("--validation", base_args.validation_path,
                       "tuning topics (needed unless --threshold)");
  base_cmd->add_option("--test", base_args.test_path, "evaluation topics")
      ->required();
  double forced_threshold = -1.0;
  auto* thr_opt = base_cmd->add_option("--threshold", forced_threshold,
                                       "skip tuning, use this threshold");
  base_cmd->add_option("--grid", base_args.grid, "tuning grid lo:hi:step");
  base_cmd->add_option("--fractions", base_args.fractions,
                       "bottom slices, comma separated");
  base_cmd->add_option("--report", base_args.report_path,
                       "write per-topic jsonl report");
  base_cmd->add_flag("--keep-singletons", base_args.keep_singletons,
                     "skip singleton filtering");
  base_cmd->add_option("--jobs", base_args.jobs, "worker threads");

  AgreeArgs agree_args;
  auto* agree_cmd =
      app.add_subcommand("agree", "Inter-annotator agreement summary");
  agree_cmd
      ->add_option("--annotations", agree_args.annotations_dir,
                   "directory of per-annotator topic files")
      ->required();
  agree_cmd->add_option("--metric", agree_args.metric,
                        "conll | hierarchy | path");
  agree_cmd->add_option("--overlap", agree_args.overlap,
                        "hierarchy overlap: any | half");
  agree_cmd->add_flag("--keep-singletons", agree_args.keep_singletons,
                      "skip singleton filtering");
  agree_cmd->add_flag("--global-best-pair", agree_args.global_best_pair,
                      "MAX-micro from the single best pooled pair");

  SliceArgs slice_args;
  auto* slice_cmd =
      app.add_subcommand("slice", "Bottom-k% topic slices by baseline score");
  slice_cmd->add_option("--scores", slice_args.scores_path,
                        "per-topic scores (jsonl)")
      ->required();
  slice_cmd->add_option("--fractions", slice_args.fractions,
                        "comma separated fractions");
  slice_cmd->add_option("--topics", slice_args.topics_path,
                        "also list topics carrying the curated flag");
  slice_cmd->add_option("--curated-flag", slice_args.curated_flag,
                        "metadata key marking curated topics");

  PrepArgs prep_args;
  auto* prep_cmd =
      app.add_subcommand("prep", "Candidate topic generation pipeline");
  prep_cmd->add_option("--kb", prep_args.kb_path, "KB concept graph")
      ->required();
  prep_cmd->add_option("--hypernyms", prep_args.hypernyms_path,
                       "extracted hypernym graph")
      ->required();
  prep_cmd->add_option("--curated", prep_args.curated_path,
                       "curated groups file");
  prep_cmd->add_option("--corpus", prep_args.corpus_path, "mention corpus")
      ->required();
  prep_cmd->add_option("--embeddings", prep_args.embeddings_path,
                       "embedding table (json or binary)")
      ->required();
  prep_cmd->add_option("--k", prep_args.k, "top-k mentions per concept")
      ->required();
  prep_cmd->add_option("--output", prep_args.output_path, "output topics")
      ->required();
  prep_cmd->add_option("--stoplist", prep_args.stoplist_path,
                       "concepts to drop after merging");
  prep_cmd->add_option("--min-similarity", prep_args.min_similarity,
                       "retrieval similarity floor");
  prep_cmd->add_option("--merge-threshold", prep_args.merge_threshold,
                       "node unification similarity");
  prep_cmd->add_option("--seed", prep_args.seed,
                       "proportional sampling seed");

  StatsArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics");
  stats_cmd->add_option("--input", stats_args.inputs, "topic files")
      ->required();
  stats_cmd->add_flag("--json", stats_args.as_json, "emit jsonl");

  ImportArgs import_args;
  auto* import_cmd =
      app.add_subcommand("import", "Convert an upstream release to jsonl");
  import_cmd->add_option("--input", import_args.inputs, "release files")
      ->required();
  import_cmd->add_option("--output", import_args.output_path, "output topics")
      ->required();
  import_cmd->add_flag("--exclusive-ends", import_args.exclusive_ends,
                       "release spans already use exclusive end indices");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (eval_cmd->parsed()) return cmd_evaluate(eval_args);
    if (infer_cmd->parsed()) return cmd_infer(infer_args);
    if (base_cmd->parsed()) {
      if (thr_opt->count() > 0) base_args.threshold = forced_threshold;
      if (!base_args.threshold && base_args.validation_path.empty()) {
        throw ValidationError("baseline needs --validation or --threshold");
      }
      return cmd_baseline(base_args);
    }
    if (agree_cmd->parsed()) return cmd_agree(agree_args);
    if (slice_cmd->parsed()) return cmd_slice(slice_args);
    if (prep_cmd->parsed()) return cmd_prep(prep_args);
    if (stats_cmd->parsed()) return cmd_stats(stats_args);
    if (import_cmd->parsed()) return cmd_import(import_args);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
