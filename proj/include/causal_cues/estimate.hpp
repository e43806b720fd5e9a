#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causal_cues/dataset.hpp"
#include "causal_cues/graph.hpp"
#include "causal_cues/identify.hpp"
#include "causal_cues/models.hpp"

namespace causal_cues {

struct EffectEstimate {
  std::string treatment;
  std::string outcome;
  std::vector<std::string> adjustment_set;
  EstimatorKind estimator = EstimatorKind::kPlugin;
  /// P(Y=1 | do(X=1)) - P(Y=1 | do(X=0)).
  double ace = 0.0;
  std::size_t strata_used = 0;
  std::size_t fallback_strata = 0;
  std::optional<std::uint64_t> seed;
};

struct PluginOptions {
  /// Additive smoothing of P(Y | X, Z) instead of the marginal fallback.
  std::optional<double> smoothing;
};

/// Stratified adjustment: sum_z [P(Y=1|X=1,z) - P(Y=1|X=0,z)] P(z) with
/// empirical frequencies. A stratum lacking one treatment arm uses
/// P(Y=1|X=x) for that arm and is counted in fallback_strata.
EffectEstimate ace_plugin(const Dataset& ds, const std::string& x, const std::string& y,
                          const std::vector<std::string>& z, const PluginOptions& options = {});

/// G-formula over a fitted outcome model on features {x} + z:
/// mean_i [f(1, z_i) - f(0, z_i)].
EffectEstimate ace_outcome_model(const Dataset& ds, const std::string& x, const std::string& y,
                                 const std::vector<std::string>& z, EstimatorKind kind, const ModelConfig& cfg);

enum class EffectStatus { kEstimated, kNoPath, kNotIdentifiable };
std::string to_string(EffectStatus status);

struct EffectRow {
  std::string treatment;
  EffectStatus status = EffectStatus::kEstimated;
  std::vector<std::string> adjustment_set;
  std::vector<EffectEstimate> estimates;
  std::vector<std::string> notes;

  const EffectEstimate* find(EstimatorKind kind) const;
};

struct EffectTableOptions {
  std::vector<EstimatorKind> estimators{EstimatorKind::kLogistic, EstimatorKind::kForest, EstimatorKind::kBoost,
                                        EstimatorKind::kPlugin};
  ModelConfig models;
  PluginOptions plugin;
  ExtensionPolicy policy = ExtensionPolicy::kAllExtensions;
  /// Restrict to one treatment; default every other node.
  std::optional<std::string> treatment;
};

struct EffectTable {
  std::string outcome;
  std::vector<EffectRow> rows;
};

/// For every other graph node connected to the outcome, estimates the effect
/// under the first minimal valid adjustment set with each estimator. Model
/// seeds are derived from (models.seed, treatment column, estimator).
EffectTable effect_table(const Dataset& ds, const MixedGraph& g, const std::string& outcome,
                         const EffectTableOptions& options = {});

std::string format_effect_table(const EffectTable& table, const std::vector<EstimatorKind>& columns);
std::string effect_table_csv(const EffectTable& table, const std::vector<EstimatorKind>& columns);
nlohmann::json to_json(const EffectTable& table);

}  // namespace causal_cues
