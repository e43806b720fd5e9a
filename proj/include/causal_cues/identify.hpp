#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causal_cues/graph.hpp"

namespace causal_cues {

/// How undirected edges in a discovered graph are resolved before the
/// backdoor criterion (which is defined on DAGs) is applied.
enum class ExtensionPolicy {
  /// A set is valid only if it is valid in every consistent DAG extension.
  kAllExtensions,
  /// Orient undirected edges away from the treatment (breadth-first), the
  /// rest by node order.
  kAwayFromTreatment,
  /// Refuse undirected edges lying on a treatment-outcome path.
  kRequireDag,
};

ExtensionPolicy parse_extension_policy(const std::string& s);

using Path = std::vector<std::size_t>;

/// Simple paths x ... y whose first edge points into x (or is undirected, in
/// which case some extension may point it into x).
std::vector<Path> backdoor_paths(const MixedGraph& g, std::size_t x, std::size_t y);

bool is_valid_backdoor(const MixedGraph& g, std::size_t x, std::size_t y, const NodeSet& z,
                       ExtensionPolicy policy = ExtensionPolicy::kAllExtensions);

struct AdjustmentReport {
  std::size_t treatment = 0;
  std::size_t outcome = 0;
  /// Sorted by size, then node order.
  std::vector<NodeSet> valid_sets;
  /// Parallel to valid_sets: no valid proper subset exists.
  std::vector<bool> minimal;
  std::vector<Path> backdoor_paths;
  std::vector<std::string> notes;

  /// First minimal set, if any set is valid.
  const NodeSet* first_minimal() const;
};

/// Brute force over all subsets of the remaining nodes (at most 12 nodes).
AdjustmentReport valid_adjustment_sets(const MixedGraph& g, std::size_t x, std::size_t y,
                                       ExtensionPolicy policy = ExtensionPolicy::kAllExtensions);

nlohmann::json to_json(const AdjustmentReport& report, const MixedGraph& g);

/// Undirected edges on some simple x ... y path.
std::vector<Edge> undirected_edges_on_paths(const MixedGraph& g, std::size_t x, std::size_t y);

}  // namespace causal_cues
