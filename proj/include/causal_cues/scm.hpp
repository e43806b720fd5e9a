#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causal_cues/dataset.hpp"
#include "causal_cues/graph.hpp"

namespace causal_cues {

/// Discrete structural causal model.
///
/// cpts[v] holds one row per joint assignment of v's parents, with parents in
/// ascending node order and the last parent varying fastest; row r is the
/// distribution of v given that assignment.
struct ScmSpec {
  MixedGraph dag;
  std::vector<std::size_t> cardinalities;
  std::vector<std::vector<std::vector<double>>> cpts;

  /// Throws InvalidSpec.
  void validate() const;
  std::size_t parent_row(std::size_t node, const std::vector<std::uint32_t>& assignment) const;
};

/// JSON layout:
///   {"nodes": [...], "cardinalities": {name: k} (optional, default 2),
///    "edges": [[from, to], ...], "cpts": {name: [[p0, p1, ...], ...]}}
ScmSpec scm_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScmSpec& spec);
ScmSpec load_scm(const std::string& path);

/// Ancestral sampling. Node v draws from its own stream seeded with
/// derive_seed(seed, {v}), one uniform per row.
Dataset sample(const ScmSpec& spec, std::size_t n, std::uint64_t seed);

/// Joint distribution over all nodes, row-major in node order.
std::vector<double> exact_joint(const ScmSpec& spec);
std::vector<double> exact_marginal(const ScmSpec& spec, std::size_t node);

/// P(Y=1 | do(X=1)) - P(Y=1 | do(X=0)) by enumerating the mutilated model.
/// Throws StateSpaceTooLarge above 2^20 joint states.
double true_ace(const ScmSpec& spec, std::size_t x, std::size_t y);
double true_ace(const ScmSpec& spec, const std::string& x, const std::string& y);

/// Built-in models: chain, collider, confounder, fig3, fig4. Throws UnknownFixture.
ScmSpec scm_fixture(const std::string& name);
std::vector<std::string> scm_fixture_names();

}  // namespace causal_cues
