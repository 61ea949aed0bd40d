/*
 *   Copyright 2026 the hetesim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// hetesim: relevance search in typed graphs from the command line.
//
//   validate     check schema/node/edge files and print counts
//   compute      full relevance matrix -> COO file + timing sidecar
//   query        top-k targets for one source node
//   materialize  store a matrix with a manifest for later queries
//   bench        timing/recall CSV across paths and strategies
//   metrics      auc / nmi / recall / rankdiff on TSV inputs
//   gen          seeded synthetic fixture generator
//
// Exit status: 0 ok, 1 usage error, 2 data error, 3 internal error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "hetesim/accel.hpp"
#include "hetesim/baselines.hpp"
#include "hetesim/engine.hpp"
#include "hetesim/errors.hpp"
#include "hetesim/eval.hpp"
#include "hetesim/parallel.hpp"
#include "hetesim/rng.hpp"
#include "hetesim/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hetesim;

namespace {

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::InvalidArgument:
      return 1;
    case ErrorKind::Internal:
      return 3;
    default:
      return 2;  // data, parse, schema and io errors
  }
}

struct GraphArgs {
  std::string schema_path, nodes_path, edges_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--schema", schema_path, "schema TSV file")->required();
    cmd->add_option("--nodes", nodes_path, "node TSV file")->required();
    cmd->add_option("--edges", edges_path, "edge TSV file")->required();
  }

  HinGraph load() const { return load_graph_files(schema_path, nodes_path, edges_path); }
};

struct StrategyArgs {
  std::string strategy = "exact";
  Index top_w = 200;
  double beta = 0.5;
  double gamma = 0.005;
  Index walkers = 500;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--strategy", strategy, "exact|dp|truncated|hybrid|mc")
        ->check(CLI::IsMember({"exact", "dp", "truncated", "hybrid", "mc"}));
    cmd->add_option("--W", top_w, "truncation top-object count");
    cmd->add_option("--beta", beta, "truncation exponent in [0,1]");
    cmd->add_option("--gamma", gamma, "threshold sampling ratio in (0,1]");
    cmd->add_option("--K", walkers, "Monte Carlo walkers per source");
    cmd->add_option("--seed", seed, "seed for sampled thresholds and walkers");
  }

  TruncationParams truncation() const {
    TruncationParams p;
    p.top_w = top_w;
    p.beta = beta;
    p.gamma = gamma;
    p.seed = seed;
    return p;
  }

  McParams mc() const {
    McParams p;
    p.walkers = walkers;
    p.seed = seed;
    return p;
  }

  RelevanceResult run(const HinGraph& graph, const MetaPath& path, bool normalized) const {
    if (strategy == "exact") return hetesim_scores(graph, path, normalized);
    if (strategy == "dp") return hetesim_dp(graph, path, normalized);
    if (strategy == "truncated") return hetesim_truncated(graph, path, truncation(), normalized);
    if (strategy == "hybrid") return hetesim_hybrid(graph, path, truncation(), normalized);
    if (strategy == "mc") return hetesim_mc(graph, path, mc(), normalized);
    raise(ErrorKind::InvalidArgument, "unknown strategy " + strategy);
  }
};

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::vector<std::string> coo_header(const RelevanceResult& r, const HinGraph& graph,
                                    const std::string& measure) {
  std::string strategy_line = "strategy: " + std::string(to_string(r.strategy));
  if (!r.params.empty()) strategy_line += " " + r.params;
  strategy_line += r.normalized ? " normalized" : " raw";
  if (measure != "hetesim") strategy_line += " measure=" + measure;
  return {"path: " + r.path, strategy_line, "graph-hash: " + hash_hex(graph.content_hash())};
}

void write_matrix_file(const std::string& out_path, const SparseMatrix& m,
                       const std::vector<std::string>& row_ids,
                       const std::vector<std::string>& col_ids,
                       const std::vector<std::string>& header) {
  std::ofstream out(out_path);
  if (!out) raise(ErrorKind::IoError, "cannot write " + out_path);
  write_matrix_coo(out, m, row_ids, col_ids, header);
}

void write_timing_sidecar(const std::string& out_path, const PhaseStats& stats) {
  std::ofstream out(out_path);
  if (!out) raise(ErrorKind::IoError, "cannot write " + out_path);
  out << "mul_seconds\t" << stats.mul_seconds << "\n";
  out << "rel_seconds\t" << stats.rel_seconds << "\n";
  out << "peak_intermediate_nnz\t" << stats.peak_intermediate_nnz() << "\n";
  out << "intermediate_nnz";
  for (Index n : stats.intermediate_nnz) out << "\t" << n;
  out << "\n";
}

// --- validate ---------------------------------------------------------------

int run_validate(const GraphArgs& files) {
  auto graph = files.load();
  const Schema& schema = graph.schema();
  std::ostringstream nodes_line;
  for (Index t = 0; t < schema.type_count(); ++t) {
    if (t) nodes_line << ", ";
    nodes_line << graph.node_count(t) << " " << schema.type_name(t);
  }
  std::cout << "nodes: " << nodes_line.str() << "\n";
  std::ostringstream edges_line;
  for (Index r = 0; r < schema.relation_count(); ++r) {
    if (r) edges_line << ", ";
    edges_line << graph.adjacency(RelationRef::forward(r)).nnz() << " " << schema.relation(r).id;
  }
  std::cout << "edges: " << (schema.relation_count() ? edges_line.str() : "(none)") << "\n";
  std::cout << "graph-hash: " << hash_hex(graph.content_hash()) << "\n";
  std::cout << "valid\n";
  return 0;
}

// --- compute ----------------------------------------------------------------

int run_compute(const GraphArgs& files, const StrategyArgs& strat, const std::string& path_text,
                const std::string& measure, bool raw, Index simrank_iters, double simrank_c,
                const std::string& out_path) {
  auto graph = files.load();

  if (measure == "simrank") {
    SimRankParams params;
    params.c = simrank_c;
    params.iterations = simrank_iters;
    RelationRef rel = graph.parse_relation_ref(path_text);
    auto result = simrank(graph, rel, params);
    const Schema& schema = graph.schema();
    const auto& src_ids = graph.node_ids(source_type_of(schema, rel));
    const auto& dst_ids = graph.node_ids(target_type_of(schema, rel));
    std::ostringstream params_line;
    params_line << "strategy: simrank C=" << simrank_c << " iterations=" << simrank_iters;
    std::vector<std::string> header = {"path: " + path_text, params_line.str(),
                                       "graph-hash: " + hash_hex(graph.content_hash())};
    write_matrix_file(out_path, result.source_pairs, src_ids, src_ids, header);
    write_matrix_file(out_path + ".target", result.target_pairs, dst_ids, dst_ids, header);
    std::cerr << "wrote " << out_path << " (source pairs) and " << out_path
              << ".target (target pairs)\n";
    return 0;
  }

  auto path = parse_path(path_text, graph.schema());
  RelevanceResult result;
  if (measure == "hetesim") {
    result = strat.run(graph, path, !raw);
  } else if (measure == "pcrw") {
    auto pm = pcrw(graph, path);
    result.scores = std::move(pm.matrix);
    result.path = pm.path;
    result.normalized = false;
  } else if (measure == "pathsim") {
    result = pathsim(graph, path);
  } else {
    raise(ErrorKind::InvalidArgument, "unknown measure " + measure);
  }

  const auto& row_ids = graph.node_ids(path.source_type());
  const auto& col_ids = graph.node_ids(path.target_type());
  write_matrix_file(out_path, result.scores, row_ids, col_ids,
                    coo_header(result, graph, measure));
  write_timing_sidecar(out_path + ".timing", result.stats);
  return 0;
}

// --- materialize / query ------------------------------------------------------

json load_manifest(const fs::path& store) {
  fs::path file = store / "manifest.json";
  if (!fs::exists(file)) return json{{"entries", json::array()}};
  std::ifstream in(file);
  if (!in) raise(ErrorKind::IoError, "cannot read " + file.string());
  json m = json::parse(in, nullptr, false);
  if (m.is_discarded()) raise(ErrorKind::ParseError, "bad manifest " + file.string());
  return m;
}

void save_manifest(const fs::path& store, const json& manifest) {
  std::ofstream out(store / "manifest.json");
  if (!out) raise(ErrorKind::IoError, "cannot write manifest");
  out << manifest.dump(2) << "\n";
}

json entry_key(const std::string& path_text, const StrategyArgs& strat, bool normalized) {
  return json{{"path", path_text},
              {"strategy", strat.strategy},
              {"W", strat.top_w},
              {"beta", strat.beta},
              {"gamma", strat.gamma},
              {"K", strat.walkers},
              {"seed", strat.seed},
              {"normalized", normalized}};
}

bool key_matches(const json& entry, const json& key) {
  for (auto& [k, v] : key.items())
    if (!entry.contains(k) || entry[k] != v) return false;
  return true;
}

int run_materialize(const GraphArgs& files, const StrategyArgs& strat,
                    const std::string& path_text, bool raw, const std::string& store_dir) {
  auto graph = files.load();
  auto path = parse_path(path_text, graph.schema());
  auto result = strat.run(graph, path, !raw);

  fs::path store(store_dir);
  fs::create_directories(store);
  json manifest = load_manifest(store);
  json key = entry_key(to_string(graph.schema(), path), strat, !raw);

  // Replace any previous entry for the same key.
  json entries = json::array();
  for (auto& e : manifest["entries"])
    if (!key_matches(e, key)) entries.push_back(e);

  std::string file_name = "m" + hash_hex(hash_bytes(key.dump())) + ".coo";
  json entry = key;
  entry["graph_hash"] = hash_hex(graph.content_hash());
  entry["file"] = file_name;
  entries.push_back(entry);
  manifest["entries"] = entries;

  write_matrix_file((store / file_name).string(), result.scores,
                    graph.node_ids(path.source_type()), graph.node_ids(path.target_type()),
                    coo_header(result, graph, "hetesim"));
  save_manifest(store, manifest);
  std::cerr << "materialized " << (store / file_name).string() << "\n";
  return 0;
}

int run_query(const GraphArgs& files, const StrategyArgs& strat, const std::string& path_text,
              const std::string& source_id, Index topk, bool raw,
              const std::string& store_dir) {
  auto graph = files.load();
  auto path = parse_path(path_text, graph.schema());
  Index source = graph.node_index(path.source_type(), source_id);

  const auto& col_ids = graph.node_ids(path.target_type());
  std::vector<RankedItem> items;

  bool from_store = false;
  if (!store_dir.empty()) {
    fs::path store(store_dir);
    json manifest = load_manifest(store);
    json key = entry_key(to_string(graph.schema(), path), strat, !raw);
    for (auto& e : manifest["entries"]) {
      if (!key_matches(e, key)) continue;
      if (e["graph_hash"] != hash_hex(graph.content_hash())) {
        std::cerr << "warning: materialized matrix is stale (graph hash mismatch); "
                     "recomputing\n";
        break;
      }
      std::ifstream in(store / std::string(e["file"]));
      if (!in) raise(ErrorKind::IoError, "missing materialized file");
      auto file = read_matrix_coo(in, &graph.node_ids(path.source_type()), &col_ids);
      auto cols = file.matrix.row_cols(source);
      auto vals = file.matrix.row_vals(source);
      for (std::size_t k = 0; k < cols.size(); ++k)
        items.push_back({col_ids[cols[k]], vals[k]});
      from_store = true;
      break;
    }
  }

  if (!from_store) {
    auto row = hetesim_row(graph, path, source_id, !raw);
    for (Index b = 0; b < static_cast<Index>(row.size()); ++b)
      if (row[b] != 0.0) items.push_back({col_ids[b], row[b]});
  }

  auto ranked = RankedList::from_items(std::move(items));
  Index limit = std::min<Index>(topk, static_cast<Index>(ranked.size()));
  for (Index i = 0; i < limit; ++i)
    std::cout << ranked.items()[i].id << "\t" << format_value_12sig(ranked.items()[i].score)
              << "\n";
  return 0;
}

// --- bench --------------------------------------------------------------------

int run_bench(const GraphArgs& files, const StrategyArgs& base_params,
              const std::vector<std::string>& path_texts,
              const std::vector<std::string>& strategies, int repetitions,
              const std::string& out_path) {
  auto graph = files.load();
  std::ofstream out(out_path);
  if (!out) raise(ErrorKind::IoError, "cannot write " + out_path);
  out << "path,strategy,rep,mul_seconds,rel_seconds,total_seconds,recall_at_100\n";

  for (const std::string& path_text : path_texts) {
    auto path = parse_path(path_text, graph.schema());
    auto exact = hetesim_scores(graph, path, true);
    const auto& col_ids = graph.node_ids(path.target_type());
    for (const std::string& strategy : strategies) {
      StrategyArgs strat = base_params;
      strat.strategy = strategy;
      double mul_total = 0.0, rel_total = 0.0, recall = 1.0;
      for (int rep = 1; rep <= repetitions; ++rep) {
        global_subchain_cache().clear();  // timings must not leak across reps
        auto result = strat.run(graph, path, true);
        recall = matrix_recall_at_k(exact.scores, result.scores, 100, col_ids);
        mul_total += result.stats.mul_seconds;
        rel_total += result.stats.rel_seconds;
        out << path_text << "," << strategy << "," << rep << "," << result.stats.mul_seconds
            << "," << result.stats.rel_seconds << ","
            << result.stats.mul_seconds + result.stats.rel_seconds << "," << recall << "\n";
      }
      double mul_mean = mul_total / repetitions, rel_mean = rel_total / repetitions;
      out << path_text << "," << strategy << ",mean," << mul_mean << "," << rel_mean << ","
          << mul_mean + rel_mean << "," << recall << "\n";
    }
  }
  return 0;
}

// --- metrics ------------------------------------------------------------------

RankedList ranked_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::IoError, "cannot open " + path);
  return read_ranked_tsv(in);
}

LabelMap labels_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::IoError, "cannot open " + path);
  return read_labels_tsv(in);
}

int run_metrics(const std::string& metric, const std::string& ranked_path,
                const std::string& exact_path, const std::string& labels_path,
                const std::string& truth_path, const std::string& positive, Index k) {
  double value = 0.0;
  if (metric == "auc") {
    // ROC over the top-k ranked items (0 = whole list).
    RankedList ranked = ranked_from_file(ranked_path);
    if (k > 0 && static_cast<Index>(ranked.size()) > k) {
      std::vector<RankedItem> head(ranked.items().begin(), ranked.items().begin() + k);
      ranked = RankedList::from_items(std::move(head));
    }
    value = auc(ranked, labels_from_file(labels_path), positive);
  } else if (metric == "nmi") {
    value = nmi(labels_from_file(labels_path), labels_from_file(truth_path));
  } else if (metric == "recall") {
    value = recall_at_k(ranked_from_file(exact_path), ranked_from_file(ranked_path), k);
  } else if (metric == "rankdiff") {
    value = avg_rank_difference(ranked_from_file(ranked_path), ranked_from_file(truth_path), k);
  } else {
    raise(ErrorKind::InvalidArgument, "unknown metric " + metric);
  }
  std::cout << metric << "\t" << format_value_12sig(value) << "\n";
  return 0;
}

// --- gen ------------------------------------------------------------------------

int run_gen(const std::string& profile, std::uint64_t seed, Index types, Index nodes,
            Index relations, double degree, bool weighted, const std::string& out_dir) {
  SynthDataset ds;
  if (profile == "tg1") {
    ds = make_tg1();
  } else if (profile == "bench") {
    ds = make_bench(seed);
  } else if (profile == "random") {
    SynthConfig config;
    config.seed = seed;
    config.types = types;
    config.nodes_per_type = nodes;
    config.relations = relations;
    config.out_degree = degree;
    config.weighted = weighted;
    ds = make_random(config);
  } else {
    raise(ErrorKind::InvalidArgument, "unknown profile " + profile);
  }
  fs::path dir(out_dir);
  fs::create_directories(dir);
  auto graph = ds.build();  // validates before writing
  {
    std::ofstream out(dir / "schema.tsv");
    write_schema_tsv(out, ds.schema);
  }
  {
    std::ofstream out(dir / "nodes.tsv");
    write_nodes_tsv(out, graph);
  }
  {
    std::ofstream out(dir / "edges.tsv");
    write_edges_tsv(out, graph);
  }
  std::cerr << "wrote " << (dir / "schema.tsv").string() << ", nodes.tsv, edges.tsv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HeteSim relevance search over typed graphs"};
  app.require_subcommand(1);

  unsigned threads = 0;
  GraphArgs graph_args;
  StrategyArgs strategy_args;
  std::string path_text, measure = "hetesim", out_path = "out.coo";
  std::string source_id, store_dir;
  bool raw = false;
  Index topk = 10;
  Index simrank_iters = 5;
  double simrank_c = 1.0;

  auto* validate_cmd = app.add_subcommand("validate", "check data files and print counts");
  graph_args.attach(validate_cmd);

  auto* compute_cmd = app.add_subcommand("compute", "write a full relevance matrix");
  graph_args.attach(compute_cmd);
  strategy_args.attach(compute_cmd);
  compute_cmd->add_option("--threads", threads, "worker thread cap (0 = hardware)");
  compute_cmd->add_option("--path", path_text, "relevance path (or relation id for simrank)")
      ->required();
  compute_cmd->add_option("--measure", measure, "hetesim|pcrw|pathsim|simrank")
      ->check(CLI::IsMember({"hetesim", "pcrw", "pathsim", "simrank"}));
  compute_cmd->add_flag("--raw", raw, "emit raw scores instead of normalized");
  compute_cmd->add_option("--simrank-c", simrank_c, "SimRank decay constant");
  compute_cmd->add_option("--iters", simrank_iters, "SimRank iterations");
  compute_cmd->add_option("--out", out_path, "output COO file")->required();

  auto* query_cmd = app.add_subcommand("query", "top-k targets for one source");
  graph_args.attach(query_cmd);
  strategy_args.attach(query_cmd);
  query_cmd->add_option("--threads", threads, "worker thread cap (0 = hardware)");
  query_cmd->add_option("--path", path_text)->required();
  query_cmd->add_option("--source", source_id, "source node external id")->required();
  query_cmd->add_option("--topk", topk, "result count");
  query_cmd->add_flag("--raw", raw);
  query_cmd->add_option("--store", store_dir, "materialization directory to read");

  auto* mat_cmd = app.add_subcommand("materialize", "store a matrix plus manifest");
  graph_args.attach(mat_cmd);
  strategy_args.attach(mat_cmd);
  mat_cmd->add_option("--threads", threads, "worker thread cap (0 = hardware)");
  mat_cmd->add_option("--path", path_text)->required();
  mat_cmd->add_flag("--raw", raw);
  mat_cmd->add_option("--store", store_dir, "materialization directory")->required();

  auto* bench_cmd = app.add_subcommand("bench", "timing and recall CSV");
  graph_args.attach(bench_cmd);
  strategy_args.attach(bench_cmd);
  bench_cmd->add_option("--threads", threads, "worker thread cap (0 = hardware)");
  std::vector<std::string> bench_paths;
  std::vector<std::string> bench_strategies = {"exact", "dp", "truncated", "hybrid", "mc"};
  int repetitions = 1;
  bench_cmd->add_option("--paths", bench_paths, "paths to benchmark")->required();
  bench_cmd->add_option("--strategies", bench_strategies, "strategies to benchmark");
  bench_cmd->add_option("--reps", repetitions, "repetitions per cell");
  bench_cmd->add_option("--out", out_path, "output CSV")->required();

  auto* metrics_cmd = app.add_subcommand("metrics", "evaluation metrics on TSV files");
  std::string metric, ranked_path, exact_path, labels_path, truth_path, positive;
  Index metric_k = 100;
  metrics_cmd->add_option("--metric", metric, "auc|nmi|recall|rankdiff")->required();
  metrics_cmd->add_option("--ranked", ranked_path, "ranked list TSV (id<TAB>score)");
  metrics_cmd->add_option("--exact", exact_path, "reference ranked list TSV (recall)");
  metrics_cmd->add_option("--labels", labels_path, "labels TSV (auc, nmi clustering)");
  metrics_cmd->add_option("--truth", truth_path, "truth labels / ranked TSV (nmi, rankdiff)");
  metrics_cmd->add_option("--positive", positive, "positive label (auc)");
  metrics_cmd->add_option("--topk", metric_k, "k (recall) or top-n (rankdiff)");

  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic fixture");
  std::string profile = "random", out_dir;
  std::uint64_t gen_seed = 1;
  Index gen_types = 3, gen_nodes = 40, gen_relations = 3;
  double gen_degree = 3.0;
  bool gen_weighted = false;
  gen_cmd->add_option("--profile", profile, "tg1|bench|random");
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_option("--types", gen_types);
  gen_cmd->add_option("--nodes", gen_nodes, "nodes per type");
  gen_cmd->add_option("--relations", gen_relations);
  gen_cmd->add_option("--degree", gen_degree, "expected out-degree");
  gen_cmd->add_flag("--weighted", gen_weighted);
  gen_cmd->add_option("--out-dir", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  set_max_threads(threads);

  try {
    if (validate_cmd->parsed()) return run_validate(graph_args);
    if (compute_cmd->parsed())
      return run_compute(graph_args, strategy_args, path_text, measure, raw, simrank_iters,
                         simrank_c, out_path);
    if (query_cmd->parsed())
      return run_query(graph_args, strategy_args, path_text, source_id, topk, raw, store_dir);
    if (mat_cmd->parsed())
      return run_materialize(graph_args, strategy_args, path_text, raw, store_dir);
    if (bench_cmd->parsed())
      return run_bench(graph_args, strategy_args, bench_paths, bench_strategies, repetitions,
                       out_path);
    if (metrics_cmd->parsed())
      return run_metrics(metric, ranked_path, exact_path, labels_path, truth_path, positive,
                         metric_k);
    if (gen_cmd->parsed())
      return run_gen(profile, gen_seed, gen_types, gen_nodes, gen_relations, gen_degree,
                     gen_weighted, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
