#include "causal_cues/pc.hpp"

#include "causal_cues/error.hpp"
#include "causal_cues/parallel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

// Calls visit on every size-k subset of pool in lexicographic order; stops
// early when visit returns true.
bool for_each_subset(const NodeSet& pool, std::size_t k, const std::function<bool(const NodeSet&)>& visit) {
  if (k > pool.size()) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  NodeSet subset(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) subset[i] = pool[idx[i]];
    if (visit(subset)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == pool.size() - k + (i - 1)) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

NodeSet without(NodeSet s, std::size_t v) {
  s.erase(std::remove(s.begin(), s.end(), v), s.end());
  return s;
}

struct EdgeOutcome {
  std::vector<CITestResult> tests;
  std::optional<NodeSet> separator;
};

EdgeOutcome test_edge(const CiOracle& oracle, std::size_t x, std::size_t y, const NodeSet& adj_x,
                      const NodeSet& adj_y, std::size_t level) {
  EdgeOutcome out;
  std::set<NodeSet> tried;
  auto run = [&](const NodeSet& z) {
    if (!tried.insert(z).second) return false;
    out.tests.push_back(oracle(x, y, z));
    if (out.tests.back().independent) {
      out.separator = z;
      return true;
    }
    return false;
  };
  if (for_each_subset(adj_x, level, run)) return out;
  for_each_subset(adj_y, level, run);
  return out;
}

}  // namespace

PcResult pc_with_oracle(const std::vector<std::string>& nodes, const CiOracle& oracle, const PcOptions& options) {
  if (nodes.size() < 2) throw CausalError(ErrorCode::kInvalidArgument, "PC needs at least two variables");
  if (!(options.ci.alpha > 0.0 && options.ci.alpha < 1.0)) {
    throw CausalError(ErrorCode::kDomainError, "alpha must lie in (0,1)");
  }
  const std::size_t p = nodes.size();
  const std::size_t max_cond = options.max_cond.value_or(p - 2);

  PcResult result{complete_undirected(nodes), {}, {}};
  MixedGraph& g = result.graph;

  for (std::size_t level = 0; level <= max_cond; ++level) {
    std::vector<Edge> edges = g.undirected_edges();
    bool any_testable = false;
    for (auto [x, y] : edges) {
      if (g.adjacent_nodes(x).size() - 1 >= level || g.adjacent_nodes(y).size() - 1 >= level) any_testable = true;
    }
    if (!any_testable) break;

    if (options.stable) {
      std::vector<NodeSet> snapshot(p);
      for (std::size_t v = 0; v < p; ++v) snapshot[v] = g.adjacent_nodes(v);
      std::vector<EdgeOutcome> outcomes(edges.size());
      parallel_for(edges.size(), [&](std::size_t e) {
        const auto [x, y] = edges[e];
        outcomes[e] = test_edge(oracle, x, y, without(snapshot[x], y), without(snapshot[y], x), level);
      });
      for (std::size_t e = 0; e < edges.size(); ++e) {
        auto& o = outcomes[e];
        for (auto& t : o.tests) result.trace.tests.push_back(std::move(t));
        if (o.separator) {
          const auto [x, y] = edges[e];
          g.remove_edge(x, y);
          result.sepsets.set(x, y, *o.separator);
          result.trace.removals.push_back({x, y, *o.separator, level});
        }
      }
    } else {
      for (auto [x, y] : edges) {
        if (!g.adjacent(x, y)) continue;
        EdgeOutcome o = test_edge(oracle, x, y, without(g.adjacent_nodes(x), y), without(g.adjacent_nodes(y), x), level);
        for (auto& t : o.tests) result.trace.tests.push_back(std::move(t));
        if (o.separator) {
          g.remove_edge(x, y);
          result.sepsets.set(x, y, *o.separator);
          result.trace.removals.push_back({x, y, *o.separator, level});
        }
      }
    }
  }

  g = orient_v_structures(g, result.sepsets, &result.trace.conflicts);
  g = apply_meek_rules(g);
  return result;
}

PcResult pc(const Dataset& ds, const PcOptions& options) {
  if (ds.n_cols() < 2) throw CausalError(ErrorCode::kInvalidArgument, "PC needs at least two columns");
  CiOracle oracle = [&ds, &options](std::size_t x, std::size_t y, std::span<const std::size_t> z) {
    return g2_test(ds, x, y, z, options.ci);
  };
  return pc_with_oracle(ds.column_names(), oracle, options);
}

CiOracle d_separation_oracle(const MixedGraph& dag) {
  if (!dag.is_dag()) throw CausalError(ErrorCode::kNotADag, "oracle needs a DAG");
  return [dag](std::size_t x, std::size_t y, std::span<const std::size_t> z) {
    CITestResult r;
    r.x = dag.node(x);
    r.y = dag.node(y);
    for (auto v : z) r.conditioning_set.push_back(dag.node(v));
    r.independent = d_separated(dag, x, y, z);
    r.p_value = r.independent ? 1.0 : 0.0;
    return r;
  };
}

std::string trace_to_json_lines(const PcTrace& trace) {
  std::ostringstream out;
  for (const auto& t : trace.tests) out << to_json(t).dump() << '\n';
  return out.str();
}

nlohmann::json to_json(const PcTrace& trace, const MixedGraph& g) {
  nlohmann::json tests = nlohmann::json::array();
  for (const auto& t : trace.tests) tests.push_back(to_json(t));
  nlohmann::json removals = nlohmann::json::array();
  for (const auto& r : trace.removals) {
    std::vector<std::string> z;
    for (auto v : r.conditioning_set) z.push_back(g.node(v));
    removals.push_back({{"pair", {g.node(r.a), g.node(r.b)}}, {"conditioning_set", z}, {"level", r.level}});
  }
  nlohmann::json conflicts = nlohmann::json::array();
  for (const auto& c : trace.conflicts) {
    conflicts.push_back({{"pair", {g.node(c.a), g.node(c.b)}}, {"reason", c.reason}});
  }
  return {{"tests", tests}, {"removals", removals}, {"conflicts", conflicts}};
}

}  // namespace causal_cues
