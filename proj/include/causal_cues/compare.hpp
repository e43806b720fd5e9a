#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causal_cues/graph.hpp"

namespace causal_cues {

/// Edge-level comparison of a found graph against an expected one, over the
/// union of their node sets (matched by name).
struct GraphComparison {
  std::vector<std::string> nodes;
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  double precision = 1.0;
  double recall = 1.0;
  /// Fraction of shared adjacencies with identical marks.
  double direction_agreement = 1.0;
  /// Missing + extra adjacencies + shared adjacencies with different marks.
  std::size_t shd = 0;
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  std::vector<std::string> reoriented;
};

GraphComparison compare_graphs(const MixedGraph& found, const MixedGraph& expected);

/// Adjacency-only structural Hamming distance.
std::size_t skeleton_shd(const MixedGraph& a, const MixedGraph& b);

std::string format_comparison(const GraphComparison& c);
nlohmann::json to_json(const GraphComparison& c);

}  // namespace causal_cues
