#include "causal_cues/cli.hpp"

#include "causal_cues/compare.hpp"
#include "causal_cues/dataset.hpp"
#include "causal_cues/ensemble.hpp"
#include "causal_cues/error.hpp"
#include "causal_cues/estimate.hpp"
#include "causal_cues/fixtures.hpp"
#include "causal_cues/ges.hpp"
#include "causal_cues/graph.hpp"
#include "causal_cues/pc.hpp"
#include "causal_cues/ranking.hpp"
#include "causal_cues/scm.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

constexpr int kUsage = 2;
constexpr int kDataError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw CausalError(ErrorCode::kMissingFile, "cannot write " + path);
  f << content;
}

Dataset load_input(const std::string& path, const std::vector<std::string>& exclude) {
  Dataset ds = load_csv(path);
  if (!exclude.empty()) ds = ds.drop(exclude);
  return ds;
}

struct DiscoverArgs {
  std::string input;
  std::string algo = "ensemble";
  double alpha = 0.05;
  std::vector<std::string> exclude;
  std::string policy = "skeleton_first";
  std::string conflict = "undirect";
  std::optional<std::size_t> max_cond;
  bool trace = false;
  std::string output;
};

struct InferArgs {
  std::string input;
  std::string graph;
  std::string outcome = "label";
  std::optional<std::string> treatment;
  std::vector<std::string> estimators{"logistic", "forest", "boost", "plugin"};
  std::uint64_t seed = 17;
  std::string policy = "all";
  std::optional<double> smoothing;
  std::vector<std::string> exclude;
  std::optional<std::string> output;
  std::optional<std::string> json;
};

struct RankArgs {
  std::string input;
  std::string target = "label";
  std::vector<std::string> exclude;
  std::optional<std::string> graph;
  std::string estimator = "logistic";
  std::uint64_t seed = 17;
  std::size_t trees = 100;
  std::optional<std::string> output;
};

struct SynthArgs {
  std::optional<std::string> fixture;
  std::optional<std::string> spec;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  std::optional<std::string> output;
};

struct CompareArgs {
  std::optional<std::string> graph;
  std::optional<std::string> graph_fixture;
  std::optional<std::string> expected;
  std::optional<std::string> expected_fixture;
  std::optional<std::string> json;
};

struct ExportArgs {
  std::optional<std::string> graph;
  std::optional<std::string> fixture;
  std::optional<std::string> scm_fixture;
  std::string format = "dot";
  std::optional<std::string> output;
};

struct SummaryArgs {
  std::string input;
  std::vector<std::string> exclude;
};

MixedGraph discover_graph(const Dataset& ds, const DiscoverArgs& a, PcTrace* pc_trace, std::vector<GesMove>* history) {
  PcOptions pc_opts;
  pc_opts.ci.alpha = a.alpha;
  pc_opts.max_cond = a.max_cond;
  std::optional<MixedGraph> g_pc, g_ges;
  if (a.algo == "pc" || a.algo == "ensemble") {
    auto r = pc(ds, pc_opts);
    if (pc_trace) *pc_trace = std::move(r.trace);
    g_pc = std::move(r.graph);
  }
  if (a.algo == "ges" || a.algo == "ensemble") {
    auto r = ges(ds);
    if (history) *history = std::move(r.score_history);
    g_ges = std::move(r.graph);
  }
  if (a.algo == "pc") return *g_pc;
  if (a.algo == "ges") return *g_ges;
  AgreementPolicy policy;
  policy.mode = parse_agreement_mode(a.policy);
  policy.conflict_action = parse_conflict_action(a.conflict);
  return ensemble(*g_pc, *g_ges, policy);
}

void cmd_discover(const DiscoverArgs& a, std::ostream& out) {
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  parse_agreement_mode(a.policy);
  parse_conflict_action(a.conflict);
  const Dataset ds = load_input(a.input, a.exclude);
  PcTrace trace;
  std::vector<GesMove> history;
  const MixedGraph g = discover_graph(ds, a, a.trace ? &trace : nullptr, a.trace ? &history : nullptr);
  write_file(a.output + ".dot", to_dot(g));
  write_file(a.output + ".json", to_json(g).dump(2) + "\n");
  if (a.trace) {
    if (a.algo != "ges") write_file(a.output + ".pc_trace.jsonl", trace_to_json_lines(trace));
    if (a.algo != "pc") write_file(a.output + ".ges_history.json", to_json(history, g).dump(2) + "\n");
  }
  out << "nodes: " << g.size() << ", directed: " << g.directed_edges().size()
      << ", undirected: " << g.undirected_edges().size() << '\n'
      << "wrote " << a.output << ".dot and " << a.output << ".json\n";
}

std::vector<EstimatorKind> parse_estimators(const std::vector<std::string>& names) {
  std::vector<EstimatorKind> kinds;
  for (const auto& n : names) {
    const EstimatorKind k = parse_estimator_kind(n);
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
  }
  if (kinds.empty()) throw UsageError("--estimators needs at least one estimator");
  return kinds;
}

void cmd_infer(const InferArgs& a, std::ostream& out) {
  if (a.treatment && *a.treatment == a.outcome) throw UsageError("--treatment must differ from --outcome");
  EffectTableOptions opts;
  opts.estimators = parse_estimators(a.estimators);
  opts.policy = parse_extension_policy(a.policy);
  opts.models.seed = a.seed;
  opts.plugin.smoothing = a.smoothing;
  opts.treatment = a.treatment;
  const Dataset ds = load_input(a.input, a.exclude);
  MixedGraph g = load_graph(a.graph);
  std::vector<std::string> keep;
  for (const auto& n : g.nodes()) {
    if (std::find(a.exclude.begin(), a.exclude.end(), n) == a.exclude.end()) keep.push_back(n);
  }
  if (keep.size() != g.size()) g = induced_subgraph(g, keep);
  const EffectTable table = effect_table(ds, g, a.outcome, opts);
  out << format_effect_table(table, opts.estimators);
  for (const auto& r : table.rows) {
    for (const auto& note : r.notes) out << "note (" << r.treatment << "): " << note << '\n';
  }
  if (a.output) write_file(*a.output, effect_table_csv(table, opts.estimators));
  if (a.json) write_file(*a.json, to_json(table).dump(2) + "\n");
}

void cmd_rank(const RankArgs& a, std::ostream& out) {
  ModelConfig cfg;
  cfg.seed = a.seed;
  cfg.forest.trees = a.trees;
  const EstimatorKind kind = parse_estimator_kind(a.estimator);
  const Dataset ds = load_input(a.input, a.exclude);
  const Importance imp = mdi_importance(ds, a.target, cfg);
  const auto mdi = rank_features(imp);

  MixedGraph g;
  if (a.graph) {
    g = load_graph(*a.graph);
    std::vector<std::string> keep;
    for (const auto& n : g.nodes()) {
      if (ds.has_column(n)) keep.push_back(n);
    }
    if (keep.size() != g.size()) g = induced_subgraph(g, keep);
  } else {
    DiscoverArgs d;
    g = discover_graph(ds, d, nullptr, nullptr);
  }
  EffectTableOptions opts;
  opts.estimators = {kind};
  opts.models = cfg;
  const EffectTable table = effect_table(ds, g, a.target, opts);
  const auto causal = rank_by_effect(table, kind);

  if (imp.degenerate) out << "note: the forest made no splits; importances are all zero\n";
  out << format_rankings(mdi, causal);
  for (const auto& r : table.rows) {
    if (r.status != EffectStatus::kEstimated) out << r.treatment << ": " << to_string(r.status) << '\n';
  }
  if (a.output) {
    nlohmann::json j{{"target", a.target}, {"mdi", to_json(mdi)}, {"causal", to_json(causal)},
                     {"causal_estimator", to_string(kind)}};
    write_file(*a.output, j.dump(2) + "\n");
  }
}

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  if (a.fixture.has_value() == a.spec.has_value()) throw UsageError("give exactly one of --fixture and --spec");
  if (a.n < 1) throw UsageError("--n must be at least 1");
  const ScmSpec spec = a.fixture ? scm_fixture(*a.fixture) : load_scm(*a.spec);
  const Dataset ds = sample(spec, a.n, a.seed);
  if (a.output) {
    write_csv(ds, *a.output);
    out << "wrote " << ds.n_rows() << " rows to " << *a.output << '\n';
  } else {
    write_csv(ds, out);
  }
}

MixedGraph graph_arg(const std::optional<std::string>& path, const std::optional<std::string>& fixture,
                     const std::string& what) {
  if (path.has_value() == fixture.has_value()) throw UsageError("give exactly one " + what + " file or fixture");
  return path ? load_graph(*path) : graph_fixture(*fixture);
}

void cmd_compare(const CompareArgs& a, std::ostream& out) {
  const MixedGraph found = graph_arg(a.graph, a.graph_fixture, "--graph");
  const MixedGraph expected = graph_arg(a.expected, a.expected_fixture, "--expected");
  const GraphComparison c = compare_graphs(found, expected);
  out << format_comparison(c);
  if (a.json) write_file(*a.json, to_json(c).dump(2) + "\n");
}

void cmd_export(const ExportArgs& a, std::ostream& out) {
  const int sources = a.graph.has_value() + a.fixture.has_value() + a.scm_fixture.has_value();
  if (sources != 1) throw UsageError("give exactly one of --graph, --fixture, --scm-fixture");
  std::string content;
  if (a.scm_fixture && a.format == "scm") {
    content = to_json(scm_fixture(*a.scm_fixture)).dump(2) + "\n";
  } else {
    const MixedGraph g = a.graph ? load_graph(*a.graph) : a.fixture ? graph_fixture(*a.fixture) : scm_fixture(*a.scm_fixture).dag;
    if (a.format == "dot") {
      content = to_dot(g);
    } else if (a.format == "json") {
      content = to_json(g).dump(2) + "\n";
    } else {
      throw UsageError(a.scm_fixture ? "--format must be dot, json or scm" : "--format must be dot or json");
    }
  }
  if (a.output) {
    write_file(*a.output, content);
  } else {
    out << content;
  }
}

void cmd_summary(const SummaryArgs& a, std::ostream& out) {
  const Dataset ds = load_input(a.input, a.exclude);
  out << to_json(summarize(ds)).dump(2) << '\n';
}

bool is_usage(ErrorCode code) {
  return code == ErrorCode::kInvalidArgument || code == ErrorCode::kUnknownFixture;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal discovery and inference over categorical annotation data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "causal_cues 1.0");

  DiscoverArgs da;
  auto* discover = app.add_subcommand("discover", "Learn a graph with PC, GES or their ensemble");
  discover->add_option("--input", da.input, "CSV dataset")->required();
  discover->add_option("--algo", da.algo, "pc, ges or ensemble")
      ->check(CLI::IsMember({"pc", "ges", "ensemble"}))
      ->capture_default_str();
  discover->add_option("--alpha", da.alpha, "CI test level")->capture_default_str();
  discover->add_option("--exclude", da.exclude, "Columns to drop before discovery")->delimiter(',');
  discover->add_option("--policy", da.policy, "Ensemble agreement: strict or skeleton_first")->capture_default_str();
  discover->add_option("--conflict", da.conflict, "Ensemble conflicts: drop or undirect")->capture_default_str();
  discover->add_option("--max-cond", da.max_cond, "Largest PC conditioning set");
  discover->add_flag("--trace", da.trace, "Also write the PC test trace and the GES move history");
  discover->add_option("--output", da.output, "Output stem; writes <stem>.dot and <stem>.json")->required();

  InferArgs ia;
  auto* infer = app.add_subcommand("infer", "Estimate average causal effects on the outcome");
  infer->add_option("--input", ia.input, "CSV dataset")->required();
  infer->add_option("--graph", ia.graph, "Graph JSON")->required();
  infer->add_option("--outcome", ia.outcome)->capture_default_str();
  infer->add_option("--treatment", ia.treatment, "Single treatment; default every other node");
  infer->add_option("--estimators", ia.estimators, "plugin, logistic, forest, boost")->delimiter(',');
  infer->add_option("--seed", ia.seed)->capture_default_str();
  infer->add_option("--extension", ia.policy, "Undirected edges: all, paper or none")->capture_default_str();
  infer->add_option("--smoothing", ia.smoothing, "Additive smoothing for the plug-in estimator");
  infer->add_option("--exclude", ia.exclude, "Columns to drop")->delimiter(',');
  infer->add_option("--output", ia.output, "CSV output path");
  infer->add_option("--json", ia.json, "JSON output path");

  RankArgs ra;
  auto* rank = app.add_subcommand("rank", "MDI feature ranking beside the causal-effect ranking");
  rank->add_option("--input", ra.input, "CSV dataset")->required();
  rank->add_option("--target", ra.target)->capture_default_str();
  rank->add_option("--exclude", ra.exclude, "Columns to drop")->delimiter(',');
  rank->add_option("--graph", ra.graph, "Graph JSON for the causal ranking; default: discovered ensemble");
  rank->add_option("--estimator", ra.estimator, "Estimator for the causal ranking")->capture_default_str();
  rank->add_option("--seed", ra.seed)->capture_default_str();
  rank->add_option("--trees", ra.trees)->capture_default_str();
  rank->add_option("--output", ra.output, "JSON output path");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Sample a dataset from a structural causal model");
  synth->add_option("--fixture", sa.fixture, "chain, collider, confounder, fig3 or fig4");
  synth->add_option("--spec", sa.spec, "SCM JSON file");
  synth->add_option("--n", sa.n)->capture_default_str();
  synth->add_option("--seed", sa.seed)->capture_default_str();
  synth->add_option("--output", sa.output, "CSV output path; default standard output");

  CompareArgs ca;
  auto* compare = app.add_subcommand("compare", "Compare a graph against an expected graph");
  compare->add_option("--graph", ca.graph, "Graph JSON");
  compare->add_option("--graph-fixture", ca.graph_fixture, "Built-in graph instead of --graph");
  compare->add_option("--expected", ca.expected, "Expected graph JSON");
  compare->add_option("--expected-fixture", ca.expected_fixture, "Built-in graph instead of --expected");
  compare->add_option("--json", ca.json, "JSON output path");

  ExportArgs ea;
  auto* exp = app.add_subcommand("export", "Write a graph as DOT or JSON, or a built-in SCM specification");
  exp->add_option("--graph", ea.graph, "Graph JSON");
  exp->add_option("--fixture", ea.fixture, "fig3, fig4, table2, table3 or expert");
  exp->add_option("--scm-fixture", ea.scm_fixture, "Built-in SCM");
  exp->add_option("--format", ea.format, "dot, json, or scm (SCM fixtures only)")->capture_default_str();
  exp->add_option("--output", ea.output, "Output path; default standard output");

  SummaryArgs ma;
  auto* summary = app.add_subcommand("summary", "Row count, marginals and class balance");
  summary->add_option("--input", ma.input, "CSV dataset")->required();
  summary->add_option("--exclude", ma.exclude, "Columns to drop")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*discover) cmd_discover(da, out);
    if (*infer) cmd_infer(ia, out);
    if (*rank) cmd_rank(ra, out);
    if (*synth) cmd_synth(sa, out);
    if (*compare) cmd_compare(ca, out);
    if (*exp) cmd_export(ea, out);
    if (*summary) cmd_summary(ma, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const CausalError& e) {
    err << "error: " << e.what() << '\n';
    return is_usage(e.code()) ? kUsage : kDataError;
  }
  return 0;
}

}  // namespace causal_cues
