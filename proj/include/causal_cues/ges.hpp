#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causal_cues/dataset.hpp"
#include "causal_cues/graph.hpp"
#include "causal_cues/stats.hpp"

namespace causal_cues {

enum class GesMoveKind { kInsert, kDelete };

/// Insert(x, y, T) adds x -> y and orients t -> y for t in T;
/// Delete(x, y, H) removes x - y and orients y -> h, x -> h for h in H.
struct GesMove {
  GesMoveKind kind = GesMoveKind::kInsert;
  std::size_t x = 0;
  std::size_t y = 0;
  NodeSet subset;
  double delta = 0.0;
};

struct GesResult {
  MixedGraph graph;
  std::vector<GesMove> score_history;
  double initial_score = 0.0;
  double final_score = 0.0;
};

struct GesOptions {
  double min_delta = 1e-9;
};

GesResult ges(const Dataset& ds, const GesOptions& options = {});

/// Sum of local BIC scores of a DAG over ds columns (matched by name).
double score_graph(const Dataset& ds, const MixedGraph& dag);

/// Operator validity and score deltas on a CPDAG, exposed for testing.
bool insert_valid(const MixedGraph& cpdag, std::size_t x, std::size_t y, const NodeSet& t);
bool delete_valid(const MixedGraph& cpdag, std::size_t x, std::size_t y, const NodeSet& h);
double insert_delta(const BicScorer& scorer, const MixedGraph& cpdag, std::size_t x, std::size_t y, const NodeSet& t);
double delete_delta(const BicScorer& scorer, const MixedGraph& cpdag, std::size_t x, std::size_t y, const NodeSet& h);
/// Applies the move and re-completes the result to a CPDAG.
MixedGraph apply_move(const MixedGraph& cpdag, const GesMove& move);

nlohmann::json to_json(const std::vector<GesMove>& history, const MixedGraph& g);

}  // namespace causal_cues
