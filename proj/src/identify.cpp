#include "causal_cues/identify.hpp"

#include "causal_cues/error.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

constexpr std::size_t kMaxAdjustmentNodes = 12;
constexpr std::size_t kMaxListedPaths = 10000;

void check_pair(const MixedGraph& g, std::size_t x, std::size_t y) {
  if (x >= g.size() || y >= g.size()) throw CausalError(ErrorCode::kUnknownNode, "node index out of range");
  if (x == y) throw CausalError(ErrorCode::kInvalidArgument, "treatment and outcome are the same node");
  if (!g.is_acyclic()) throw CausalError(ErrorCode::kNotADag, "directed part of the graph has a cycle");
}

// Enumerates simple x ... y paths; visit returns false to stop.
void for_each_simple_path(const MixedGraph& g, std::size_t x, std::size_t y,
                          const std::function<bool(const Path&)>& visit) {
  std::vector<bool> on_path(g.size(), false);
  Path path{x};
  on_path[x] = true;
  bool stop = false;
  std::function<void(std::size_t)> rec = [&](std::size_t v) {
    for (std::size_t w : g.adjacent_nodes(v)) {
      if (stop) return;
      if (on_path[w]) continue;
      path.push_back(w);
      if (w == y) {
        if (!visit(path)) stop = true;
      } else {
        on_path[w] = true;
        rec(w);
        on_path[w] = false;
      }
      path.pop_back();
    }
  };
  rec(x);
}

std::string format_edges(const MixedGraph& g, const std::vector<Edge>& edges) {
  std::string out;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (i) out += ", ";
    out += g.node(edges[i].first) + " - " + g.node(edges[i].second);
  }
  return out;
}

MixedGraph orient_away_from(const MixedGraph& g, std::size_t x) {
  MixedGraph out = g;
  std::vector<bool> seen(g.size(), false);
  seen[x] = true;
  std::deque<std::size_t> queue{x};
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w : out.undirected_neighbors(v)) {
      out.add_directed(v, w);
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  for (auto [a, b] : out.undirected_edges()) out.add_directed(a, b);
  if (!out.is_acyclic()) {
    throw CausalError(ErrorCode::kUnresolvedUndirectedEdge,
                      "orienting undirected edges away from " + g.node(x) + " creates a directed cycle");
  }
  return out;
}

std::vector<MixedGraph> resolve_dags(const MixedGraph& g, std::size_t x, std::size_t y, ExtensionPolicy policy,
                                     std::vector<std::string>* notes) {
  if (g.is_dag()) return {g};
  const auto und = g.undirected_edges();
  switch (policy) {
    case ExtensionPolicy::kAwayFromTreatment:
      if (notes) notes->push_back("undirected edges oriented away from " + g.node(x) + ": " + format_edges(g, und));
      return {orient_away_from(g, x)};
    case ExtensionPolicy::kRequireDag: {
      const auto on_paths = undirected_edges_on_paths(g, x, y);
      if (!on_paths.empty()) {
        throw CausalError(ErrorCode::kUnresolvedUndirectedEdge,
                          "undirected edges between " + g.node(x) + " and " + g.node(y) + ": " +
                              format_edges(g, on_paths));
      }
      [[fallthrough]];
    }
    case ExtensionPolicy::kAllExtensions: {
      auto exts = consistent_extensions(g);
      if (exts.empty()) {
        exts = acyclic_orientations(g);
        if (notes) notes->push_back("graph has no consistent DAG extension; using every acyclic orientation");
      }
      if (exts.empty()) {
        throw CausalError(ErrorCode::kUnresolvedUndirectedEdge,
                          "no acyclic orientation of: " + format_edges(g, und));
      }
      if (notes) {
        notes->push_back("undirected edges " + format_edges(g, und) + " resolved over " +
                         std::to_string(exts.size()) + " DAG extension(s)");
      }
      return exts;
    }
  }
  return {};
}

bool valid_in_dag(const MixedGraph& dag, std::size_t x, std::size_t y, const NodeSet& z) {
  const NodeSet desc = descendants(dag, x);
  for (auto v : z) {
    if (std::binary_search(desc.begin(), desc.end(), v)) return false;
  }
  MixedGraph cut = dag;
  for (auto c : dag.children(x)) cut.remove_edge(x, c);
  return d_separated(cut, x, y, z);
}

}  // namespace

ExtensionPolicy parse_extension_policy(const std::string& s) {
  if (s == "all") return ExtensionPolicy::kAllExtensions;
  if (s == "paper" || s == "away") return ExtensionPolicy::kAwayFromTreatment;
  if (s == "none" || s == "dag") return ExtensionPolicy::kRequireDag;
  throw CausalError(ErrorCode::kInvalidArgument, "unknown extension policy '" + s + "'");
}

std::vector<Edge> undirected_edges_on_paths(const MixedGraph& g, std::size_t x, std::size_t y) {
  std::set<Edge> found;
  for_each_simple_path(g, x, y, [&](const Path& p) {
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
      if (g.has_undirected(p[i], p[i + 1])) found.insert({std::min(p[i], p[i + 1]), std::max(p[i], p[i + 1])});
    }
    return true;
  });
  return {found.begin(), found.end()};
}

std::vector<Path> backdoor_paths(const MixedGraph& g, std::size_t x, std::size_t y) {
  check_pair(g, x, y);
  std::vector<Path> out;
  for_each_simple_path(g, x, y, [&](const Path& p) {
    const std::size_t first = p[1];
    if (g.has_directed(first, x) || g.has_undirected(first, x)) out.push_back(p);
    return out.size() < kMaxListedPaths;
  });
  return out;
}

bool is_valid_backdoor(const MixedGraph& g, std::size_t x, std::size_t y, const NodeSet& z, ExtensionPolicy policy) {
  check_pair(g, x, y);
  for (auto v : z) {
    if (v >= g.size()) throw CausalError(ErrorCode::kUnknownNode, "node index out of range");
    if (v == x || v == y) throw CausalError(ErrorCode::kOverlappingArguments, g.node(v) + " is in the adjustment set");
  }
  NodeSet sorted = z;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& dag : resolve_dags(g, x, y, policy, nullptr)) {
    if (!valid_in_dag(dag, x, y, sorted)) return false;
  }
  return true;
}

const NodeSet* AdjustmentReport::first_minimal() const {
  for (std::size_t i = 0; i < valid_sets.size(); ++i) {
    if (minimal[i]) return &valid_sets[i];
  }
  return nullptr;
}

AdjustmentReport valid_adjustment_sets(const MixedGraph& g, std::size_t x, std::size_t y, ExtensionPolicy policy) {
  check_pair(g, x, y);
  if (g.size() > kMaxAdjustmentNodes) {
    throw CausalError(ErrorCode::kTooManyNodes, std::to_string(g.size()) + " nodes exceed the subset enumeration cap of " +
                                                    std::to_string(kMaxAdjustmentNodes));
  }
  AdjustmentReport report;
  report.treatment = x;
  report.outcome = y;
  report.backdoor_paths = backdoor_paths(g, x, y);
  if (report.backdoor_paths.size() >= kMaxListedPaths) report.notes.push_back("backdoor path listing truncated");

  const auto dags = resolve_dags(g, x, y, policy, &report.notes);
  NodeSet others;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (v != x && v != y) others.push_back(v);
  }
  for (std::uint32_t m = 0; m < (1u << others.size()); ++m) {
    NodeSet z;
    for (std::size_t i = 0; i < others.size(); ++i) {
      if (m & (1u << i)) z.push_back(others[i]);
    }
    const bool ok = std::all_of(dags.begin(), dags.end(), [&](const MixedGraph& d) { return valid_in_dag(d, x, y, z); });
    if (ok) report.valid_sets.push_back(std::move(z));
  }
  std::sort(report.valid_sets.begin(), report.valid_sets.end(), [](const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (const auto& s : report.valid_sets) {
    bool minimal = true;
    for (const auto& t : report.valid_sets) {
      if (t.size() >= s.size()) break;
      if (std::includes(s.begin(), s.end(), t.begin(), t.end())) {
        minimal = false;
        break;
      }
    }
    report.minimal.push_back(minimal);
  }
  return report;
}

nlohmann::json to_json(const AdjustmentReport& report, const MixedGraph& g) {
  auto names = [&](const std::vector<std::size_t>& s) {
    std::vector<std::string> out;
    for (auto v : s) out.push_back(g.node(v));
    return out;
  };
  nlohmann::json sets = nlohmann::json::array();
  for (std::size_t i = 0; i < report.valid_sets.size(); ++i) {
    sets.push_back({{"set", names(report.valid_sets[i])}, {"minimal", static_cast<bool>(report.minimal[i])}});
  }
  nlohmann::json paths = nlohmann::json::array();
  for (const auto& p : report.backdoor_paths) paths.push_back(names(p));
  return {{"treatment", g.node(report.treatment)},
          {"outcome", g.node(report.outcome)},
          {"valid_sets", sets},
          {"backdoor_paths", paths},
          {"notes", report.notes}};
}

}  // namespace causal_cues
