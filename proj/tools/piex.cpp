// piex -- prime-implicant explanations for reaction classifiers.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "piex/bench.h"
#include "piex/classifier.h"
#include "piex/evaluation.h"
#include "piex/extension_dag.h"
#include "piex/io.h"
#include "piex/pi_search.h"
#include "piex/reaction.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kScoring = 2, kResourceCap = 3 };

std::string instance_name(const fs::path &file, const piex::DocumentMeta &meta) {
  return meta.name ? *meta.name : file.stem().string();
}

std::vector<fs::path> json_files(const fs::path &dir) {
  std::vector<fs::path> out;
  for (const auto &entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string numbered(std::string_view prefix, std::size_t k,
                     std::string_view ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", k);
  return std::string(prefix) + buf + std::string(ext);
}

void check_size(const piex::Topology &g, std::size_t max_nodes,
                const std::string &what) {
  if (g.node_count() > max_nodes)
    throw piex::ResourceCapError(what + " has " +
                                 std::to_string(g.node_count()) +
                                 " nodes; --max-nodes allows " +
                                 std::to_string(max_nodes));
}

//
// explain
//

struct ExplainArgs {
  std::string its;
  std::string classifier;
  double threshold = 0.5;
  std::size_t max_nodes = 25;
  std::size_t max_dag_nodes = 10'000'000;
  std::size_t max_batch = 1024;
  std::size_t jobs = 1;
  std::string out;
  bool dot = false;
};

ordered_json report_json(const std::string &name, const piex::ItsGraph &its,
                         const piex::SearchReport &r,
                         const piex::DecisionFunction &clf) {
  ordered_json j;
  j["instance"] = name;
  j["classifier"] = clf.scorer().describe();
  j["threshold"] = clf.threshold();
  j["instance_score"] = r.instance_score;
  j["label"] = r.label ? 1 : 0;
  j["its_nodes"] = its.node_count();
  j["its_edges"] = its.edge_count();
  j["classifier_calls"] = r.classifier_calls;
  j["cache_hits"] = r.cache_hits;
  j["dag_nodes_total"] = r.dag_nodes_total;
  j["dag_nodes_pruned"] = r.dag_nodes_pruned;
  j["rounds"] = r.rounds;
  ordered_json list = ordered_json::array();
  for (std::size_t k = 0; k < r.explanations.size(); ++k) {
    ordered_json e;
    e["file"] = numbered("explanation_", k + 1, ".json");
    e["edge_count"] = r.explanations[k].its_edges.size();
    ordered_json edges = ordered_json::array();
    for (const piex::Edge &x : r.explanations[k].its_edges)
      edges.push_back({x.u, x.v});
    e["edges"] = std::move(edges);
    list.push_back(std::move(e));
  }
  j["explanations"] = std::move(list);
  return j;
}

void explain_one(const fs::path &file, const ExplainArgs &args,
                 const piex::DecisionFunction &clf, const fs::path &out_dir,
                 std::ostream &log) {
  piex::DocumentMeta meta;
  const piex::ItsGraph its = piex::parse_its(piex::read_text_file(file), &meta);
  const std::string name = instance_name(file, meta);
  check_size(its.graph(), args.max_nodes, "instance '" + name + "'");

  piex::ExplainOptions opts;
  opts.max_batch = args.max_batch;
  opts.max_dag_nodes = args.max_dag_nodes;
  const piex::SearchReport r = piex::explain_instance(its, clf, opts);
  const ordered_json report = report_json(name, its, r, clf);

  if (out_dir.empty()) {
    log << report.dump(2) << "\n";
    return;
  }
  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < r.explanations.size(); ++k) {
    const piex::LabeledGraph sub =
        piex::edge_subgraph(its.graph(), r.explanations[k].its_edges);
    piex::DocumentMeta sub_meta;
    sub_meta.name = name + " explanation " + std::to_string(k + 1);
    sub_meta.source = file.filename().string();
    piex::write_text_file_atomic(out_dir / numbered("explanation_", k + 1, ".json"),
                                 piex::serialize_its(sub, sub_meta));
    if (args.dot)
      piex::write_text_file_atomic(out_dir / numbered("explanation_", k + 1, ".dot"),
                                   piex::its_to_dot(sub, *sub_meta.name));
  }
  if (args.dot)
    piex::write_text_file_atomic(out_dir / "instance.dot",
                                 piex::its_to_dot(its.graph(), name));
  piex::write_text_file_atomic(out_dir / "report.json", report.dump(2) + "\n");
  log << name << ": " << r.explanations.size() << " explanation(s), "
      << r.classifier_calls << " classifier calls, " << r.dag_nodes_total
      << " DAG nodes\n";
}

int run_explain(const ExplainArgs &args) {
  const piex::DecisionFunction clf(piex::make_scorer(args.classifier),
                                   args.threshold);
  const fs::path input(args.its);
  if (!fs::is_directory(input)) {
    explain_one(input, args, clf, args.out, std::cout);
    return kOk;
  }

  const std::vector<fs::path> files = json_files(input);
  std::vector<std::string> logs(files.size());
  std::vector<std::exception_ptr> errors(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < files.size();) {
      std::ostringstream log;
      try {
        const fs::path dir =
            args.out.empty() ? fs::path() : fs::path(args.out) / files[i].stem();
        explain_one(files[i], args, clf, dir, log);
      } catch (...) {
        errors[i] = std::current_exception();
      }
      logs[i] = log.str();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(args.jobs, files.size()); ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::cout << logs[i];
    if (errors[i])
      std::rethrow_exception(errors[i]);
  }
  return kOk;
}

//
// enumerate
//

struct EnumerateArgs {
  std::string graph;
  piex::NodeId root = 0;
  std::string dag_out;
  bool count_only = false;
  std::size_t max_nodes = 25;
};

int run_enumerate(const EnumerateArgs &args) {
  const piex::LabeledGraph g =
      piex::parse_plain_graph(piex::read_text_file(args.graph));
  check_size(g, args.max_nodes, "graph");
  if (!args.dag_out.empty())
    piex::write_text_file_atomic(
        args.dag_out,
        piex::dag_to_dot(piex::build_extension_dag(g, args.root, 10'000'000)));
  piex::RootedSubgraphStream stream(g, args.root);
  std::uint64_t count = 0;
  while (auto mask = stream.next_mask()) {
    ++count;
    if (args.count_only)
      continue;
    const piex::NodeSet s = stream.index().to_node_set(*mask);
    std::string line;
    for (piex::NodeId id : s)
      line += (line.empty() ? "" : " ") + std::to_string(id);
    std::cout << line << '\n';
  }
  if (args.count_only)
    std::cout << count << '\n';
  return kOk;
}

//
// apply-rule
//

struct ApplyArgs {
  std::string rule;
  std::string reactants;
  std::size_t max_candidates = 1000;
  bool keep_duplicates = false;
  std::string out;
};

int run_apply(const ApplyArgs &args) {
  const piex::ReactionRule rule = piex::parse_rule(piex::read_text_file(args.rule));
  const piex::MolecularGraph reactants =
      piex::parse_molecule(piex::read_text_file(args.reactants));
  piex::ApplyOptions opts;
  opts.max_candidates = args.max_candidates;
  opts.deduplicate = !args.keep_duplicates;
  const std::vector<piex::ItsGraph> candidates =
      piex::apply_rule(rule, reactants, opts);
  if (!args.out.empty())
    fs::create_directories(args.out);
  ordered_json all = ordered_json::array();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    piex::DocumentMeta meta;
    meta.name = "candidate " + std::to_string(k + 1);
    const std::string text = piex::serialize_its(candidates[k], meta);
    if (!args.out.empty())
      piex::write_text_file_atomic(
          fs::path(args.out) / numbered("candidate_", k + 1, ".json"), text);
    all.push_back(ordered_json::parse(text));
  }
  std::cout << all.dump(2) << '\n';
  return kOk;
}

//
// rate
//

struct RateArgs {
  std::string obtained;
  std::string expected;
  std::string report;
  std::string expected_dir;
  std::string csv;
  std::string summary_csv;
};

ordered_json rating_json(const piex::Rating &r) {
  ordered_json j;
  j["rating"] = r.value;
  j["extra_carbons"] = r.extra_carbons;
  j["extra_heteroatoms"] = r.extra_heteroatoms;
  return j;
}

piex::InstanceResult rate_report_dir(const fs::path &dir,
                                     const fs::path &expected_dir) {
  const nlohmann::json report =
      nlohmann::json::parse(piex::read_text_file(dir / "report.json"));
  piex::InstanceResult res;
  res.name = dir.filename().string();
  res.classifier_calls = report.at("classifier_calls").get<std::size_t>();
  res.dag_nodes = report.at("dag_nodes_total").get<std::size_t>();
  std::vector<piex::LabeledGraph> explanations;
  for (const auto &e : report.at("explanations"))
    explanations.push_back(piex::parse_labeled_graph(
        piex::read_text_file(dir / e.at("file").get<std::string>())));
  res.explanations = explanations.size();
  const fs::path expected = expected_dir / (res.name + ".json");
  if (!explanations.empty() && fs::exists(expected)) {
    const piex::BestRating best = piex::best_rating(
        explanations, piex::parse_labeled_graph(piex::read_text_file(expected)));
    res.best = best.rating;
    res.top_rated_edges = explanations[best.index].edge_count();
  }
  return res;
}

int run_rate(const RateArgs &args) {
  if (!args.obtained.empty()) {
    if (args.expected.empty())
      throw piex::ValidationError({"--obtained requires --expected"});
    const piex::Rating r = piex::rate_explanation(
        piex::parse_labeled_graph(piex::read_text_file(args.obtained)),
        piex::parse_labeled_graph(piex::read_text_file(args.expected)));
    std::cout << rating_json(r).dump() << '\n';
    return kOk;
  }
  if (args.report.empty() || args.expected_dir.empty() || args.csv.empty())
    throw piex::ValidationError(
        {"rate needs --obtained/--expected or --report/--expected-dir/--csv"});

  const fs::path root(args.report);
  std::vector<fs::path> dirs;
  if (fs::exists(root / "report.json")) {
    dirs.push_back(root);
  } else {
    for (const auto &entry : fs::directory_iterator(root))
      if (entry.is_directory() && fs::exists(entry.path() / "report.json"))
        dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
  }
  std::vector<piex::InstanceResult> results;
  for (const fs::path &d : dirs)
    results.push_back(rate_report_dir(d, args.expected_dir));
  piex::write_text_file_atomic(args.csv, piex::ratings_csv(results));
  const std::string summary = piex::summary_csv(piex::summarize(results));
  if (!args.summary_csv.empty())
    piex::write_text_file_atomic(args.summary_csv, summary);
  std::cout << summary;
  return kOk;
}

//
// bench
//

struct BenchArgs {
  std::string nodes = "10..18";
  std::vector<double> degrees{3.0};
  std::size_t seeds = 1;
  std::uint64_t first_seed = 0;
  std::uint64_t cap = 10'000'000;
  std::string family = "random";
  std::string mode = "nodes";
  std::string csv;
};

int run_bench(const BenchArgs &args) {
  piex::BenchConfig cfg;
  const auto dots = args.nodes.find("..");
  try {
    if (dots == std::string::npos)
      throw std::invalid_argument("range");
    std::size_t used = 0;
    const std::string lo = args.nodes.substr(0, dots);
    const std::string hi = args.nodes.substr(dots + 2);
    cfg.min_nodes = std::stoul(lo, &used);
    if (used != lo.size())
      throw std::invalid_argument("range");
    cfg.max_nodes = std::stoul(hi, &used);
    if (used != hi.size())
      throw std::invalid_argument("range");
  } catch (const std::logic_error &) {
    throw piex::ValidationError({"--nodes must look like A..B"});
  }
  cfg.degrees = args.degrees;
  cfg.seeds = args.seeds;
  cfg.first_seed = args.first_seed;
  cfg.cap = args.cap;
  cfg.family = args.family == "path"       ? piex::GraphFamily::kPath
               : args.family == "complete" ? piex::GraphFamily::kComplete
                                           : piex::GraphFamily::kRandom;
  cfg.mode = args.mode == "its" ? piex::BenchMode::kItsEdges
                                : piex::BenchMode::kNodes;
  const auto rows = piex::bench_extensions(cfg);
  const std::string csv = piex::bench_csv(rows);
  if (args.csv.empty())
    std::cout << csv;
  else
    piex::write_text_file_atomic(args.csv, csv);
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Prime-implicant explanations for reaction classifiers"};
  app.require_subcommand(1);

  ExplainArgs ex;
  auto *explain = app.add_subcommand("explain", "Explain ITS instances");
  explain->add_option("--its", ex.its, "ITS-JSON file or directory")->required();
  explain->add_option("--classifier", ex.classifier,
                      "pattern:SPEC | size:N | table:FILE | external:CMD")
      ->required();
  explain->add_option("--threshold", ex.threshold, "Positive iff score >= P")
      ->required();
  explain->add_option("--max-nodes", ex.max_nodes, "Refuse larger instances")
      ->capture_default_str();
  explain->add_option("--max-dag-nodes", ex.max_dag_nodes,
                      "Abort when the search space grows past N")
      ->capture_default_str();
  explain->add_option("--max-batch", ex.max_batch, "Scoring chunk size")
      ->capture_default_str();
  explain->add_option("--jobs", ex.jobs, "Instances explained in parallel")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  explain->add_option("--out", ex.out, "Output directory");
  explain->add_flag("--dot", ex.dot, "Also write Graphviz files");

  EnumerateArgs en;
  auto *enumerate = app.add_subcommand(
      "enumerate", "List connected node sets containing a root");
  enumerate->add_option("--graph", en.graph, "Graph JSON file")->required();
  enumerate->add_option("--root", en.root, "Root node id")->required();
  enumerate->add_option("--dag-out", en.dag_out, "Write the extension DAG (DOT)");
  enumerate->add_flag("--count-only", en.count_only, "Print only the count");
  enumerate->add_option("--max-nodes", en.max_nodes, "Refuse larger graphs")
      ->capture_default_str();

  ApplyArgs ap;
  auto *apply = app.add_subcommand("apply-rule", "Generate candidate reactions");
  apply->add_option("--rule", ap.rule, "Rule file (ITS-JSON)")->required();
  apply->add_option("--reactants", ap.reactants, "Molecule file")->required();
  apply->add_option("--max-candidates", ap.max_candidates)->capture_default_str();
  apply->add_flag("--keep-duplicates", ap.keep_duplicates,
                  "Do not merge isomorphic candidates");
  apply->add_option("--out", ap.out, "Also write candidate_NNN.json here");

  RateArgs ra;
  auto *rate = app.add_subcommand("rate", "Rate explanations");
  rate->add_option("--obtained", ra.obtained, "Obtained explanation");
  rate->add_option("--expected", ra.expected, "Expected explanation");
  rate->add_option("--report", ra.report, "explain --out directory");
  rate->add_option("--expected-dir", ra.expected_dir,
                   "Expected explanations named <instance>.json");
  rate->add_option("--csv", ra.csv, "Per-instance ratings CSV");
  rate->add_option("--summary-csv", ra.summary_csv, "Summary CSV");

  BenchArgs be;
  auto *bench = app.add_subcommand("bench", "Extension-count benchmark");
  bench->add_option("--nodes", be.nodes, "Node range A..B")->capture_default_str();
  bench->add_option("--degree", be.degrees, "Mean degree targets")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--seeds", be.seeds, "Seeds per (n, degree)")
      ->capture_default_str();
  bench->add_option("--first-seed", be.first_seed)->capture_default_str();
  bench->add_option("--cap", be.cap, "Extension count cap per row")
      ->capture_default_str();
  bench->add_option("--family", be.family)
      ->check(CLI::IsMember({"random", "path", "complete"}))
      ->capture_default_str();
  bench->add_option("--mode", be.mode, "nodes: graph itself; its: search space")
      ->check(CLI::IsMember({"nodes", "its"}))
      ->capture_default_str();
  bench->add_option("--csv", be.csv, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*explain)
      return run_explain(ex);
    if (*enumerate)
      return run_enumerate(en);
    if (*apply)
      return run_apply(ap);
    if (*rate)
      return run_rate(ra);
    return run_bench(be);
  } catch (const piex::ValidationError &e) {
    std::cerr << "error: invalid input\n";
    for (const std::string &v : e.violations())
      std::cerr << "  - " << v << '\n';
    return kValidation;
  } catch (const piex::ScoringError &e) {
    std::cerr << "error: classifier failed: " << e.what() << '\n';
    return kScoring;
  } catch (const piex::ResourceCapError &e) {
    std::cerr << "error: resource cap: " << e.what() << '\n';
    return kResourceCap;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
}
