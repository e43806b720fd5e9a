#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causal_cues/dataset.hpp"
#include "causal_cues/estimate.hpp"
#include "causal_cues/models.hpp"

namespace causal_cues {

struct FeatureScore {
  std::string feature;
  double score = 0.0;
};

struct Importance {
  std::string target;
  /// One entry per feature, in dataset column order.
  std::vector<FeatureScore> scores;
  /// No split anywhere in the forest (e.g. constant target); scores are all 0.
  bool degenerate = false;
};

/// Random-forest mean decrease in impurity over every non-target column,
/// normalized to sum 1. Features are fed to the forest sorted by name, so
/// scores do not depend on column order.
Importance mdi_importance(const Dataset& ds, const std::string& target, const ModelConfig& cfg);

struct RankedFeature {
  std::string feature;
  double score = 0.0;
  /// score minus the next entry's score (0 for the last).
  double margin = 0.0;
  bool tied_with_next = false;
};

/// Descending score; ties (within 1e-12) keep dataset column order.
std::vector<RankedFeature> rank_features(const Importance& importance);
std::vector<RankedFeature> rank_features(const Dataset& ds, const std::string& target, const ModelConfig& cfg);

/// Treatments ordered by the given estimator's ACE, descending. Rows without
/// that estimate are left out.
std::vector<RankedFeature> rank_by_effect(const EffectTable& table, EstimatorKind kind);

std::string format_rankings(const std::vector<RankedFeature>& mdi, const std::vector<RankedFeature>& causal);
nlohmann::json to_json(const std::vector<RankedFeature>& ranking);

}  // namespace causal_cues
