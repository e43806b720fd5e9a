#include "causal_cues/ranking.hpp"

#include "causal_cues/error.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

constexpr double kTieTolerance = 1e-12;

std::vector<RankedFeature> rank(std::vector<FeatureScore> scores) {
  std::stable_sort(scores.begin(), scores.end(), [](const FeatureScore& a, const FeatureScore& b) {
    return a.score > b.score + kTieTolerance;
  });
  std::vector<RankedFeature> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    RankedFeature r{scores[i].feature, scores[i].score, 0.0, false};
    if (i + 1 < scores.size()) {
      r.margin = scores[i].score - scores[i + 1].score;
      r.tied_with_next = r.margin <= kTieTolerance;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

Importance mdi_importance(const Dataset& ds, const std::string& target, const ModelConfig& cfg) {
  cfg.validate();
  ds.column_index(target);
  std::vector<std::string> features;
  for (const auto& n : ds.column_names()) {
    if (n != target) features.push_back(n);
  }
  if (features.empty()) throw CausalError(ErrorCode::kInvalidArgument, "no feature columns besides " + target);
  std::vector<std::string> by_name = features;
  std::sort(by_name.begin(), by_name.end());

  const TrainingData data = training_data(ds, by_name, target);
  const ForestModel forest = ForestModel::fit(data, cfg.forest, cfg.seed);
  const auto& raw = forest.raw_importance();
  const double total = std::accumulate(raw.begin(), raw.end(), 0.0);

  Importance imp;
  imp.target = target;
  imp.degenerate = !(total > 0.0);
  for (const auto& f : features) {
    const std::size_t k = static_cast<std::size_t>(std::lower_bound(by_name.begin(), by_name.end(), f) - by_name.begin());
    imp.scores.push_back({f, imp.degenerate ? 0.0 : raw[k] / total});
  }
  return imp;
}

std::vector<RankedFeature> rank_features(const Importance& importance) { return rank(importance.scores); }

std::vector<RankedFeature> rank_features(const Dataset& ds, const std::string& target, const ModelConfig& cfg) {
  return rank_features(mdi_importance(ds, target, cfg));
}

std::vector<RankedFeature> rank_by_effect(const EffectTable& table, EstimatorKind kind) {
  std::vector<FeatureScore> scores;
  for (const auto& r : table.rows) {
    if (const auto* e = r.find(kind)) scores.push_back({r.treatment, e->ace});
  }
  return rank(std::move(scores));
}

std::string format_rankings(const std::vector<RankedFeature>& mdi, const std::vector<RankedFeature>& causal) {
  std::vector<std::string> left{"MDI importance"}, right{"Causal effect"};
  for (const auto& r : mdi) left.push_back(r.feature + " " + fmt(r.score) + (r.tied_with_next ? " (tie)" : ""));
  for (const auto& r : causal) right.push_back(r.feature + " " + fmt(r.score) + (r.tied_with_next ? " (tie)" : ""));
  std::size_t width = 0;
  for (const auto& s : left) width = std::max(width, s.size());
  std::ostringstream out;
  const std::size_t rows = std::max(left.size(), right.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string l = i < left.size() ? left[i] : "";
    const std::string r = i < right.size() ? right[i] : "";
    const std::string rank = i == 0 ? "rank" : std::to_string(i);
    out << rank << std::string(6 - std::min<std::size_t>(rank.size(), 5), ' ') << l << std::string(width - l.size() + 4, ' ')
        << r << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const std::vector<RankedFeature>& ranking) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : ranking) {
    out.push_back({{"feature", r.feature}, {"score", r.score}, {"margin", r.margin}, {"tied_with_next", r.tied_with_next}});
  }
  return out;
}

}  // namespace causal_cues
