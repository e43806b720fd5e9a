#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causal_cues/dataset.hpp"
#include "causal_cues/graph.hpp"
#include "causal_cues/stats.hpp"

namespace causal_cues {

/// Answers "is x independent of y given z". Must be safe to call concurrently.
using CiOracle = std::function<CITestResult(std::size_t x, std::size_t y, std::span<const std::size_t> z)>;

struct PcOptions {
  CiOptions ci;
  /// Largest conditioning set tried; default p - 2.
  std::optional<std::size_t> max_cond;
  /// Adjacency snapshot per level, removals committed at the level barrier.
  bool stable = true;
};

struct PcRemoval {
  std::size_t a = 0;
  std::size_t b = 0;
  NodeSet conditioning_set;
  std::size_t level = 0;
};

struct PcTrace {
  std::vector<CITestResult> tests;
  std::vector<PcRemoval> removals;
  std::vector<OrientationConflict> conflicts;
};

struct PcResult {
  MixedGraph graph;
  SepsetMap sepsets;
  PcTrace trace;
};

PcResult pc(const Dataset& ds, const PcOptions& options = {});
/// Same algorithm with an arbitrary CI oracle (d-separation in tests).
PcResult pc_with_oracle(const std::vector<std::string>& nodes, const CiOracle& oracle, const PcOptions& options = {});

/// CI oracle answering by d-separation in a known DAG.
CiOracle d_separation_oracle(const MixedGraph& dag);

/// One JSON object per test, newline separated.
std::string trace_to_json_lines(const PcTrace& trace);
nlohmann::json to_json(const PcTrace& trace, const MixedGraph& g);

}  // namespace causal_cues
