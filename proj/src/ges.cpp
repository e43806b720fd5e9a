#include "causal_cues/ges.hpp"

#include "causal_cues/error.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

// Floating-point slack when comparing candidate deltas; keeps the first
// candidate in enumeration order among numerically equal ones.
constexpr double kTieSlack = 1e-12;

std::uint32_t to_mask(const NodeSet& s) {
  std::uint32_t m = 0;
  for (auto v : s) m |= (1u << v);
  return m;
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// All subsets ordered by size, then lexicographically.
std::vector<NodeSet> subsets_by_size(const NodeSet& pool) {
  std::vector<NodeSet> out;
  const std::size_t n = pool.size();
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    NodeSet s;
    for (std::size_t i = 0; i < n; ++i) {
      if (m & (1u << i)) s.push_back(pool[i]);
    }
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

// Undirected neighbours of y that are adjacent to x.
NodeSet na_yx(const MixedGraph& g, std::size_t y, std::size_t x) {
  NodeSet out;
  for (auto t : g.undirected_neighbors(y)) {
    if (t != x && g.adjacent(t, x)) out.push_back(t);
  }
  return out;
}

bool is_clique(const MixedGraph& g, const NodeSet& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (!g.adjacent(s[i], s[j])) return false;
    }
  }
  return true;
}

// Semi-directed path from -> ... -> to that avoids blocked nodes.
bool semi_directed_path(const MixedGraph& g, std::size_t from, std::size_t to, const NodeSet& blocked) {
  std::vector<bool> seen(g.size(), false);
  for (auto b : blocked) seen[b] = true;
  seen[from] = true;
  std::deque<std::size_t> queue{from};
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    NodeSet next = g.children(v);
    const NodeSet und = g.undirected_neighbors(v);
    next.insert(next.end(), und.begin(), und.end());
    for (auto w : next) {
      if (w == to) return true;
      if (!seen[w]) {
        seen[w] = true;
        queue.push_back(w);
      }
    }
  }
  return false;
}

MixedGraph complete_to_cpdag(const MixedGraph& pdag) {
  auto dag = dag_extension(pdag);
  if (!dag) throw CausalError(ErrorCode::kNotADag, "GES move produced a PDAG without a consistent extension");
  return cpdag_of(*dag);
}

}  // namespace

bool insert_valid(const MixedGraph& g, std::size_t x, std::size_t y, const NodeSet& t) {
  if (x == y || g.adjacent(x, y)) return false;
  for (auto v : t) {
    if (!g.has_undirected(v, y) || g.adjacent(v, x)) return false;
  }
  const NodeSet na_t = set_union(na_yx(g, y, x), t);
  if (!is_clique(g, na_t)) return false;
  return !semi_directed_path(g, y, x, na_t);
}

bool delete_valid(const MixedGraph& g, std::size_t x, std::size_t y, const NodeSet& h) {
  if (x == y || !(g.has_directed(x, y) || g.has_undirected(x, y))) return false;
  const NodeSet na = na_yx(g, y, x);
  if (!std::includes(na.begin(), na.end(), h.begin(), h.end())) return false;
  return is_clique(g, set_difference(na, h));
}

double insert_delta(const BicScorer& scorer, const MixedGraph& g, std::size_t x, std::size_t y, const NodeSet& t) {
  const NodeSet base = set_union(set_union(na_yx(g, y, x), t), g.parents(y));
  const std::uint32_t m = to_mask(base);
  return scorer.local(y, m | (1u << x)) - scorer.local(y, m);
}

double delete_delta(const BicScorer& scorer, const MixedGraph& g, std::size_t x, std::size_t y, const NodeSet& h) {
  const NodeSet base = set_union(set_difference(na_yx(g, y, x), h), g.parents(y));
  const std::uint32_t m = to_mask(base) & ~(1u << x);
  return scorer.local(y, m) - scorer.local(y, m | (1u << x));
}

MixedGraph apply_move(const MixedGraph& g, const GesMove& move) {
  MixedGraph out = g;
  if (move.kind == GesMoveKind::kInsert) {
    out.add_directed(move.x, move.y);
    for (auto t : move.subset) out.add_directed(t, move.y);
  } else {
    out.remove_edge(move.x, move.y);
    for (auto h : move.subset) {
      if (out.has_undirected(move.y, h)) out.add_directed(move.y, h);
      if (out.has_undirected(move.x, h)) out.add_directed(move.x, h);
    }
  }
  return complete_to_cpdag(out);
}

GesResult ges(const Dataset& ds, const GesOptions& options) {
  if (ds.n_cols() < 2) throw CausalError(ErrorCode::kInvalidArgument, "GES needs at least two columns");
  const BicScorer scorer(ds);
  const std::size_t p = ds.n_cols();
  GesResult result{MixedGraph(ds.column_names()), {}, 0.0, 0.0};
  for (std::size_t v = 0; v < p; ++v) result.initial_score += scorer.local(v, 0);
  double total = result.initial_score;

  auto search = [&](GesMoveKind kind) {
    while (true) {
      const MixedGraph& g = result.graph;
      std::optional<GesMove> best;
      for (std::size_t x = 0; x < p; ++x) {
        for (std::size_t y = 0; y < p; ++y) {
          if (x == y) continue;
          NodeSet pool;
          if (kind == GesMoveKind::kInsert) {
            if (g.adjacent(x, y)) continue;
            for (auto t : g.undirected_neighbors(y)) {
              if (t != x && !g.adjacent(t, x)) pool.push_back(t);
            }
          } else {
            if (!(g.has_directed(x, y) || g.has_undirected(x, y))) continue;
            pool = na_yx(g, y, x);
          }
          for (const NodeSet& s : subsets_by_size(pool)) {
            const double d = kind == GesMoveKind::kInsert ? insert_delta(scorer, g, x, y, s)
                                                          : delete_delta(scorer, g, x, y, s);
            if (best && d <= best->delta + kTieSlack) continue;
            const bool valid = kind == GesMoveKind::kInsert ? insert_valid(g, x, y, s) : delete_valid(g, x, y, s);
            if (valid) best = GesMove{kind, x, y, s, d};
          }
        }
      }
      if (!best || best->delta <= options.min_delta) return;
      result.graph = apply_move(g, *best);
      total += best->delta;
      result.score_history.push_back(*best);
    }
  };
  search(GesMoveKind::kInsert);
  search(GesMoveKind::kDelete);
  result.final_score = total;
  return result;
}

double score_graph(const Dataset& ds, const MixedGraph& dag) {
  if (!dag.is_dag()) throw CausalError(ErrorCode::kNotADag, "score_graph needs a DAG");
  double total = 0.0;
  for (std::size_t v = 0; v < dag.size(); ++v) {
    std::vector<std::string> parents;
    for (auto p : dag.parents(v)) parents.push_back(dag.node(p));
    total += local_bic(ds, dag.node(v), parents).score;
  }
  return total;
}

nlohmann::json to_json(const std::vector<GesMove>& history, const MixedGraph& g) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : history) {
    std::vector<std::string> subset;
    for (auto v : m.subset) subset.push_back(g.node(v));
    out.push_back({{"move", m.kind == GesMoveKind::kInsert ? "insert" : "delete"},
                   {"x", g.node(m.x)},
                   {"y", g.node(m.y)},
                   {"subset", subset},
                   {"delta", m.delta}});
  }
  return out;
}

}  // namespace causal_cues
