#include "causal_cues/graph.hpp"

#include "causal_cues/error.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace causal_cues {

MixedGraph::MixedGraph(std::vector<std::string> nodes) : nodes_(std::move(nodes)) {
  std::set<std::string> seen;
  for (const auto& n : nodes_) {
    if (!seen.insert(n).second) throw CausalError(ErrorCode::kDuplicateNode, n);
  }
  marks_.assign(nodes_.size() * nodes_.size(), Mark::kNone);
}

std::size_t MixedGraph::index_of(const std::string& name) const {
  const auto it = std::find(nodes_.begin(), nodes_.end(), name);
  if (it == nodes_.end()) throw CausalError(ErrorCode::kUnknownNode, name);
  return static_cast<std::size_t>(it - nodes_.begin());
}

bool MixedGraph::has_node(const std::string& name) const {
  return std::find(nodes_.begin(), nodes_.end(), name) != nodes_.end();
}

void MixedGraph::check(std::size_t a, std::size_t b) const {
  if (a >= size() || b >= size()) throw CausalError(ErrorCode::kUnknownNode, "node index out of range");
  if (a == b) throw CausalError(ErrorCode::kInvalidArgument, "self-loop on " + nodes_[a]);
}

void MixedGraph::set(std::size_t a, std::size_t b, Mark m) {
  const std::size_t n = nodes_.size();
  marks_[a * n + b] = m;
  Mark back = Mark::kNone;
  if (m == Mark::kOut) back = Mark::kIn;
  if (m == Mark::kIn) back = Mark::kOut;
  if (m == Mark::kUndirected) back = Mark::kUndirected;
  marks_[b * n + a] = back;
}

void MixedGraph::add_directed(std::size_t from, std::size_t to) {
  check(from, to);
  set(from, to, Mark::kOut);
}

void MixedGraph::add_undirected(std::size_t a, std::size_t b) {
  check(a, b);
  set(a, b, Mark::kUndirected);
}

void MixedGraph::remove_edge(std::size_t a, std::size_t b) {
  check(a, b);
  set(a, b, Mark::kNone);
}

NodeSet MixedGraph::parents(std::size_t v) const {
  NodeSet out;
  for (std::size_t u = 0; u < size(); ++u) {
    if (u != v && mark(u, v) == Mark::kOut) out.push_back(u);
  }
  return out;
}

NodeSet MixedGraph::children(std::size_t v) const {
  NodeSet out;
  for (std::size_t u = 0; u < size(); ++u) {
    if (u != v && mark(v, u) == Mark::kOut) out.push_back(u);
  }
  return out;
}

NodeSet MixedGraph::undirected_neighbors(std::size_t v) const {
  NodeSet out;
  for (std::size_t u = 0; u < size(); ++u) {
    if (u != v && mark(v, u) == Mark::kUndirected) out.push_back(u);
  }
  return out;
}

NodeSet MixedGraph::adjacent_nodes(std::size_t v) const {
  NodeSet out;
  for (std::size_t u = 0; u < size(); ++u) {
    if (u != v && mark(v, u) != Mark::kNone) out.push_back(u);
  }
  return out;
}

std::vector<Edge> MixedGraph::directed_edges() const {
  std::vector<Edge> out;
  for (std::size_t a = 0; a < size(); ++a) {
    for (std::size_t b = 0; b < size(); ++b) {
      if (a != b && mark(a, b) == Mark::kOut) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<Edge> MixedGraph::undirected_edges() const {
  std::vector<Edge> out;
  for (std::size_t a = 0; a < size(); ++a) {
    for (std::size_t b = a + 1; b < size(); ++b) {
      if (mark(a, b) == Mark::kUndirected) out.emplace_back(a, b);
    }
  }
  return out;
}

std::size_t MixedGraph::edge_count() const {
  std::size_t c = 0;
  for (std::size_t a = 0; a < size(); ++a) {
    for (std::size_t b = a + 1; b < size(); ++b) c += adjacent(a, b);
  }
  return c;
}

bool MixedGraph::has_undirected_edges() const {
  return std::any_of(marks_.begin(), marks_.end(), [](Mark m) { return m == Mark::kUndirected; });
}

std::optional<std::vector<std::size_t>> MixedGraph::topological_order() const {
  const std::size_t n = size();
  std::vector<std::size_t> indeg(n, 0);
  for (auto [a, b] : directed_edges()) ++indeg[b];
  std::vector<std::size_t> order;
  std::vector<bool> done(n, false);
  // Smallest available index first, so the order is deterministic.
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!done[v] && indeg[v] == 0) {
        pick = v;
        break;
      }
    }
    if (pick == n) return std::nullopt;
    done[pick] = true;
    order.push_back(pick);
    for (std::size_t c : children(pick)) --indeg[c];
  }
  return order;
}

bool MixedGraph::is_acyclic() const { return topological_order().has_value(); }

bool MixedGraph::has_directed_path(std::size_t from, std::size_t to) const {
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> stack{from};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t c : children(v)) {
      if (c == to) return true;
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  return false;
}

MixedGraph MixedGraph::skeleton() const {
  MixedGraph g(nodes_);
  for (std::size_t a = 0; a < size(); ++a) {
    for (std::size_t b = a + 1; b < size(); ++b) {
      if (adjacent(a, b)) g.add_undirected(a, b);
    }
  }
  return g;
}

void SepsetMap::set(std::size_t a, std::size_t b, NodeSet z) {
  std::sort(z.begin(), z.end());
  entries_[{std::min(a, b), std::max(a, b)}] = std::move(z);
}

const NodeSet* SepsetMap::find(std::size_t a, std::size_t b) const {
  const auto it = entries_.find({std::min(a, b), std::max(a, b)});
  return it == entries_.end() ? nullptr : &it->second;
}

MixedGraph complete_undirected(const std::vector<std::string>& nodes) {
  if (nodes.empty()) throw CausalError(ErrorCode::kInvalidArgument, "graph needs at least one node");
  MixedGraph g(nodes);
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) g.add_undirected(a, b);
  }
  return g;
}

NodeSet descendants(const MixedGraph& g, std::size_t x) {
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> stack{x};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t c : g.children(v)) {
      if (!seen[c]) {
        seen[c] = true;
        stack.push_back(c);
      }
    }
  }
  NodeSet out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (seen[v] && v != x) out.push_back(v);
  }
  return out;
}

NodeSet ancestors(const MixedGraph& g, std::size_t x) {
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> stack{x};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t p : g.parents(v)) {
      if (!seen[p]) {
        seen[p] = true;
        stack.push_back(p);
      }
    }
  }
  NodeSet out;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (seen[v] && v != x) out.push_back(v);
  }
  return out;
}

bool d_separated(const MixedGraph& dag, std::size_t x, std::size_t y, std::span<const std::size_t> z) {
  if (!dag.is_dag()) throw CausalError(ErrorCode::kNotADag, "d-separation needs a DAG");
  const std::size_t n = dag.size();
  if (x >= n || y >= n) throw CausalError(ErrorCode::kUnknownNode, "node index out of range");
  if (x == y) throw CausalError(ErrorCode::kOverlappingArguments, "x and y are the same node");
  std::vector<bool> in_z(n, false);
  for (auto v : z) {
    if (v >= n) throw CausalError(ErrorCode::kUnknownNode, "node index out of range");
    if (v == x || v == y) throw CausalError(ErrorCode::kOverlappingArguments, dag.node(v) + " is in the conditioning set");
    in_z[v] = true;
  }
  // Nodes that are in z or have a descendant in z: colliders there are open.
  std::vector<bool> opens_collider(n, false);
  for (auto v : z) {
    opens_collider[v] = true;
    for (auto a : ancestors(dag, v)) opens_collider[a] = true;
  }

  // Reachability over (node, arrived-from-child) / (node, arrived-from-parent).
  enum Dir { kUp = 0, kDown = 1 };
  std::vector<std::array<bool, 2>> visited(n, {false, false});
  std::deque<std::pair<std::size_t, Dir>> queue{{x, kUp}};
  while (!queue.empty()) {
    auto [v, dir] = queue.front();
    queue.pop_front();
    if (visited[v][dir]) continue;
    visited[v][dir] = true;
    if (v == y) return false;
    if (dir == kUp) {
      if (in_z[v]) continue;
      for (auto p : dag.parents(v)) queue.emplace_back(p, kUp);
      for (auto c : dag.children(v)) queue.emplace_back(c, kDown);
    } else {
      if (!in_z[v]) {
        for (auto c : dag.children(v)) queue.emplace_back(c, kDown);
      }
      if (opens_collider[v]) {
        for (auto p : dag.parents(v)) queue.emplace_back(p, kUp);
      }
    }
  }
  return true;
}

bool d_separated(const MixedGraph& dag, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z) {
  NodeSet zi;
  for (const auto& v : z) zi.push_back(dag.index_of(v));
  return d_separated(dag, dag.index_of(x), dag.index_of(y), zi);
}

MixedGraph orient_v_structures(const MixedGraph& skeleton, const SepsetMap& sepsets,
                               std::vector<OrientationConflict>* conflicts) {
  const std::size_t n = skeleton.size();
  if (!skeleton.directed_edges().empty()) {
    throw CausalError(ErrorCode::kInvalidArgument, "v-structure orientation expects an undirected skeleton");
  }
  // demand[a][c]: some triple asked for a -> c.
  std::vector<std::vector<bool>> demand(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (skeleton.adjacent(a, b)) continue;
      const NodeSet* sep = sepsets.find(a, b);
      if (!sep) {
        throw CausalError(ErrorCode::kMissingSepset, skeleton.node(a) + ", " + skeleton.node(b));
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (c == a || c == b || !skeleton.adjacent(a, c) || !skeleton.adjacent(b, c)) continue;
        if (std::binary_search(sep->begin(), sep->end(), c)) continue;
        demand[a][c] = true;
        demand[b][c] = true;
      }
    }
  }

  MixedGraph g = skeleton;
  auto report = [&](std::size_t a, std::size_t b, const std::string& why) {
    if (conflicts) conflicts->push_back({std::min(a, b), std::max(a, b), why});
  };
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (demand[u][v] && demand[v][u]) report(u, v, "opposite v-structure orientations");
    }
  }
  // Orient in (head, tail) order; an orientation that would close a cycle
  // is dropped.
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t a = 0; a < n; ++a) {
      if (!demand[a][c] || demand[c][a]) continue;
      if (g.has_directed_path(c, a)) {
        report(a, c, "orientation would create a directed cycle");
        continue;
      }
      g.add_directed(a, c);
    }
  }
  return g;
}

namespace {

bool orient_if_acyclic(MixedGraph& g, std::size_t from, std::size_t to) {
  if (g.has_directed_path(to, from)) return false;
  g.add_directed(from, to);
  return true;
}

// a - b becomes a -> b when some c -> a with c, b nonadjacent.
bool meek_r1(MixedGraph& g) {
  bool changed = false;
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b : g.undirected_neighbors(a)) {
      for (std::size_t c : g.parents(a)) {
        if (c != b && !g.adjacent(c, b)) {
          changed |= orient_if_acyclic(g, a, b);
          break;
        }
      }
    }
  }
  return changed;
}

// a - b becomes a -> b when a -> c -> b.
bool meek_r2(MixedGraph& g) {
  bool changed = false;
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b : g.undirected_neighbors(a)) {
      for (std::size_t c : g.children(a)) {
        if (g.has_directed(c, b)) {
          changed |= orient_if_acyclic(g, a, b);
          break;
        }
      }
    }
  }
  return changed;
}

// a - b becomes a -> b when a - c -> b and a - d -> b with c, d nonadjacent.
bool meek_r3(MixedGraph& g) {
  bool changed = false;
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b : g.undirected_neighbors(a)) {
      const NodeSet nb = g.undirected_neighbors(a);
      bool fire = false;
      for (std::size_t i = 0; i < nb.size() && !fire; ++i) {
        const std::size_t c = nb[i];
        if (c == b || !g.has_directed(c, b)) continue;
        for (std::size_t j = i + 1; j < nb.size(); ++j) {
          const std::size_t d = nb[j];
          if (d == b || !g.has_directed(d, b)) continue;
          if (!g.adjacent(c, d)) {
            fire = true;
            break;
          }
        }
      }
      if (fire) changed |= orient_if_acyclic(g, a, b);
    }
  }
  return changed;
}

// a - b becomes a -> b when a - d, d -> c -> b, a adjacent to c, and d, b
// nonadjacent.
bool meek_r4(MixedGraph& g) {
  bool changed = false;
  for (std::size_t a = 0; a < g.size(); ++a) {
    for (std::size_t b : g.undirected_neighbors(a)) {
      bool fire = false;
      for (std::size_t c : g.parents(b)) {
        if (c == a || !g.adjacent(a, c)) continue;
        for (std::size_t d : g.parents(c)) {
          if (d != b && d != a && g.has_undirected(a, d) && !g.adjacent(d, b)) {
            fire = true;
            break;
          }
        }
        if (fire) break;
      }
      if (fire) changed |= orient_if_acyclic(g, a, b);
    }
  }
  return changed;
}

}  // namespace

MixedGraph apply_meek_rules(const MixedGraph& input) {
  MixedGraph g = input;
  bool changed = true;
  while (changed) {
    changed = false;
    changed |= meek_r1(g);
    changed |= meek_r2(g);
    changed |= meek_r3(g);
    changed |= meek_r4(g);
  }
  return g;
}

std::vector<std::array<std::size_t, 3>> v_structures(const MixedGraph& g) {
  std::vector<std::array<std::size_t, 3>> out;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const NodeSet pa = g.parents(c);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = i + 1; j < pa.size(); ++j) {
        if (!g.adjacent(pa[i], pa[j])) out.push_back({pa[i], c, pa[j]});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

MixedGraph cpdag_of(const MixedGraph& dag) {
  if (!dag.is_dag()) throw CausalError(ErrorCode::kNotADag, "cpdag_of needs a DAG");
  MixedGraph g = dag.skeleton();
  for (const auto& [a, c, b] : v_structures(dag)) {
    g.add_directed(a, c);
    g.add_directed(b, c);
  }
  return apply_meek_rules(g);
}

std::optional<MixedGraph> dag_extension(const MixedGraph& pdag) {
  if (!pdag.is_acyclic()) return std::nullopt;
  MixedGraph work = pdag;
  MixedGraph out = pdag;
  const std::size_t n = pdag.size();
  std::vector<bool> removed(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n && pick == n; ++v) {
      if (removed[v] || !work.children(v).empty()) continue;
      const NodeSet und = work.undirected_neighbors(v);
      const NodeSet adj = work.adjacent_nodes(v);
      bool ok = true;
      for (std::size_t u : und) {
        for (std::size_t w : adj) {
          if (w != u && !work.adjacent(u, w)) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) pick = v;
    }
    if (pick == n) return std::nullopt;
    for (std::size_t u : work.undirected_neighbors(pick)) out.add_directed(u, pick);
    for (std::size_t u : work.adjacent_nodes(pick)) work.remove_edge(u, pick);
    removed[pick] = true;
  }
  return out;
}

namespace {

std::vector<MixedGraph> enumerate_orientations(const MixedGraph& pdag, std::size_t max_undirected,
                                               bool require_same_v_structures) {
  const auto und = pdag.undirected_edges();
  if (und.size() > max_undirected) {
    throw CausalError(ErrorCode::kTooManyNodes,
                      std::to_string(und.size()) + " undirected edges exceed the enumeration cap of " +
                          std::to_string(max_undirected));
  }
  std::vector<MixedGraph> out;
  if (!pdag.is_acyclic()) return out;
  const auto target_v = v_structures(pdag);
  MixedGraph g = pdag;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == und.size()) {
      if (!require_same_v_structures || v_structures(g) == target_v) out.push_back(g);
      return;
    }
    const auto [a, b] = und[k];
    for (int dir = 0; dir < 2; ++dir) {
      const std::size_t from = dir == 0 ? a : b;
      const std::size_t to = dir == 0 ? b : a;
      if (g.has_directed_path(to, from)) continue;
      g.add_directed(from, to);
      rec(k + 1);
      g.add_undirected(a, b);
    }
  };
  rec(0);
  return out;
}

}  // namespace

std::vector<MixedGraph> consistent_extensions(const MixedGraph& pdag, std::size_t max_undirected) {
  return enumerate_orientations(pdag, max_undirected, true);
}

std::vector<MixedGraph> acyclic_orientations(const MixedGraph& pdag, std::size_t max_undirected) {
  return enumerate_orientations(pdag, max_undirected, false);
}

namespace {

std::string dot_id(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_dot(const MixedGraph& g, const std::string& name) {
  // Graphviz rejects "--" inside a digraph, so mixed graphs draw undirected
  // edges as arrowless "->".
  const auto directed = g.directed_edges();
  const auto undirected = g.undirected_edges();
  const bool mixed = !directed.empty();
  std::ostringstream out;
  out << (mixed ? "digraph " : "graph ") << dot_id(name) << " {\n";
  for (const auto& n : g.nodes()) out << "  " << dot_id(n) << ";\n";
  for (auto [a, b] : directed) out << "  " << dot_id(g.node(a)) << " -> " << dot_id(g.node(b)) << ";\n";
  for (auto [a, b] : undirected) {
    if (mixed) {
      out << "  " << dot_id(g.node(a)) << " -> " << dot_id(g.node(b)) << " [dir=none];\n";
    } else {
      out << "  " << dot_id(g.node(a)) << " -- " << dot_id(g.node(b)) << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

nlohmann::json to_json(const MixedGraph& g) {
  nlohmann::json directed = nlohmann::json::array();
  for (auto [a, b] : g.directed_edges()) directed.push_back({g.node(a), g.node(b)});
  nlohmann::json undirected = nlohmann::json::array();
  for (auto [a, b] : g.undirected_edges()) undirected.push_back({g.node(a), g.node(b)});
  return {{"nodes", g.nodes()}, {"directed", std::move(directed)}, {"undirected", std::move(undirected)}};
}

MixedGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
    throw CausalError(ErrorCode::kMalformedJson, "graph JSON needs a \"nodes\" array");
  }
  std::vector<std::string> nodes;
  for (const auto& n : j["nodes"]) {
    if (!n.is_string()) throw CausalError(ErrorCode::kMalformedJson, "node names must be strings");
    nodes.push_back(n.get<std::string>());
  }
  MixedGraph g(std::move(nodes));
  auto read_edges = [&](const char* key, bool directed) {
    if (!j.contains(key)) return;
    if (!j[key].is_array()) throw CausalError(ErrorCode::kMalformedJson, std::string(key) + " must be an array");
    for (const auto& e : j[key]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw CausalError(ErrorCode::kMalformedJson, std::string(key) + " entries must be [from, to] name pairs");
      }
      const std::size_t a = g.index_of(e[0].get<std::string>());
      const std::size_t b = g.index_of(e[1].get<std::string>());
      if (a == b) throw CausalError(ErrorCode::kMalformedJson, "self-loop on " + g.node(a));
      if (g.adjacent(a, b)) {
        throw CausalError(ErrorCode::kMalformedJson, "pair " + g.node(a) + ", " + g.node(b) + " listed twice");
      }
      if (directed) {
        g.add_directed(a, b);
      } else {
        g.add_undirected(a, b);
      }
    }
  };
  read_edges("directed", true);
  read_edges("undirected", false);
  return g;
}

MixedGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CausalError(ErrorCode::kMissingFile, path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CausalError(ErrorCode::kMalformedJson, path + ": " + e.what());
  }
  return graph_from_json(j);
}

void save_graph(const MixedGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CausalError(ErrorCode::kMissingFile, "cannot write " + path);
  out << to_json(g).dump(2) << '\n';
}

MixedGraph induced_subgraph(const MixedGraph& g, const std::vector<std::string>& keep) {
  MixedGraph out(keep);
  std::vector<std::size_t> idx;
  for (const auto& k : keep) idx.push_back(g.index_of(k));
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) {
      if (a == b) continue;
      if (g.has_directed(idx[a], idx[b])) out.add_directed(a, b);
      if (a < b && g.has_undirected(idx[a], idx[b])) out.add_undirected(a, b);
    }
  }
  return out;
}

std::string format_node_set(const MixedGraph& g, std::span<const std::size_t> s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ", ";
    out += g.node(s[i]);
  }
  return out + "}";
}

}  // namespace causal_cues
