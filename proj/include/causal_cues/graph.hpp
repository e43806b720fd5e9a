#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace causal_cues {

using NodeSet = std::vector<std::size_t>;  // sorted node indices
using Edge = std::pair<std::size_t, std::size_t>;

/// Graph with directed (a -> b) and undirected (a - b) edges over a fixed,
/// ordered node list. Skeletons, PDAGs, CPDAGs and DAGs all use this type.
/// Every pair of nodes carries at most one edge.
class MixedGraph {
 public:
  MixedGraph() = default;
  /// Throws DuplicateNode.
  explicit MixedGraph(std::vector<std::string> nodes);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& node(std::size_t i) const { return nodes_.at(i); }
  /// Throws UnknownNode.
  std::size_t index_of(const std::string& name) const;
  bool has_node(const std::string& name) const;

  bool has_directed(std::size_t from, std::size_t to) const { return mark(from, to) == Mark::kOut; }
  bool has_undirected(std::size_t a, std::size_t b) const { return mark(a, b) == Mark::kUndirected; }
  bool adjacent(std::size_t a, std::size_t b) const { return mark(a, b) != Mark::kNone; }

  /// Each add replaces whatever edge the pair had before.
  void add_directed(std::size_t from, std::size_t to);
  void add_undirected(std::size_t a, std::size_t b);
  void remove_edge(std::size_t a, std::size_t b);

  NodeSet parents(std::size_t v) const;
  NodeSet children(std::size_t v) const;
  NodeSet undirected_neighbors(std::size_t v) const;
  NodeSet adjacent_nodes(std::size_t v) const;

  /// Sorted by (from, to).
  std::vector<Edge> directed_edges() const;
  /// Pairs with first < second, sorted.
  std::vector<Edge> undirected_edges() const;
  std::size_t edge_count() const;
  bool has_undirected_edges() const;

  /// True when the directed part has no cycle.
  bool is_acyclic() const;
  bool is_dag() const { return !has_undirected_edges() && is_acyclic(); }
  /// Directed path from -> ... -> to of length >= 1.
  bool has_directed_path(std::size_t from, std::size_t to) const;
  std::optional<std::vector<std::size_t>> topological_order() const;

  /// Same adjacencies, all undirected.
  MixedGraph skeleton() const;

  friend bool operator==(const MixedGraph&, const MixedGraph&) = default;

 private:
  enum class Mark : unsigned char { kNone, kOut, kIn, kUndirected };
  Mark mark(std::size_t a, std::size_t b) const { return marks_[a * nodes_.size() + b]; }
  void set(std::size_t a, std::size_t b, Mark m);
  void check(std::size_t a, std::size_t b) const;

  std::vector<std::string> nodes_;
  std::vector<Mark> marks_;
};

/// Conditioning sets that separated removed pairs, keyed by unordered pair.
class SepsetMap {
 public:
  void set(std::size_t a, std::size_t b, NodeSet z);
  const NodeSet* find(std::size_t a, std::size_t b) const;
  bool contains(std::size_t a, std::size_t b) const { return find(a, b) != nullptr; }
  const std::map<Edge, NodeSet>& entries() const { return entries_; }
  friend bool operator==(const SepsetMap&, const SepsetMap&) = default;

 private:
  std::map<Edge, NodeSet> entries_;
};

/// An edge that unshielded triples (or acyclicity) wanted oriented both ways.
struct OrientationConflict {
  std::size_t a = 0;
  std::size_t b = 0;
  std::string reason;
};

MixedGraph complete_undirected(const std::vector<std::string>& nodes);

/// Requires a DAG (throws NotADag) and x, y outside z.
bool d_separated(const MixedGraph& dag, std::size_t x, std::size_t y, std::span<const std::size_t> z);
bool d_separated(const MixedGraph& dag, const std::string& x, const std::string& y,
                 const std::vector<std::string>& z);

/// Orients a -> c <- b for unshielded triples whose middle node is outside the
/// pair's sepset. Edges demanded in both directions, or whose orientation
/// would close a directed cycle, stay undirected and are reported.
MixedGraph orient_v_structures(const MixedGraph& skeleton, const SepsetMap& sepsets,
                               std::vector<OrientationConflict>* conflicts = nullptr);

/// Meek rules R1-R4, round-robin to a fixed point.
MixedGraph apply_meek_rules(const MixedGraph& g);

MixedGraph cpdag_of(const MixedGraph& dag);

/// Nodes reachable from x over directed edges, x excluded.
NodeSet descendants(const MixedGraph& g, std::size_t x);
NodeSet ancestors(const MixedGraph& g, std::size_t x);

/// Unshielded colliders (a, c, b) with a < b, a -> c <- b.
std::vector<std::array<std::size_t, 3>> v_structures(const MixedGraph& g);

/// One consistent DAG extension of a PDAG (Dor-Tarsi), if any exists.
std::optional<MixedGraph> dag_extension(const MixedGraph& pdag);

/// Every DAG that keeps the skeleton and directed edges, is acyclic and adds
/// no v-structure. Throws TooManyNodes above max_undirected undirected edges.
std::vector<MixedGraph> consistent_extensions(const MixedGraph& pdag, std::size_t max_undirected = 24);
/// Every acyclic orientation of the undirected edges (no v-structure check).
std::vector<MixedGraph> acyclic_orientations(const MixedGraph& pdag, std::size_t max_undirected = 24);

std::string to_dot(const MixedGraph& g, const std::string& name = "G");
nlohmann::json to_json(const MixedGraph& g);
/// Throws MalformedJson, DuplicateNode, UnknownNode.
MixedGraph graph_from_json(const nlohmann::json& j);
MixedGraph load_graph(const std::string& path);
void save_graph(const MixedGraph& g, const std::string& path);

/// Same graph over a node subset (edges among kept nodes only).
MixedGraph induced_subgraph(const MixedGraph& g, const std::vector<std::string>& keep);

std::string format_node_set(const MixedGraph& g, std::span<const std::size_t> s);

}  // namespace causal_cues
