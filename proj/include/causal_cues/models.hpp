#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causal_cues/dataset.hpp"
#include "causal_cues/rng.hpp"

namespace causal_cues {

struct LogisticConfig {
  double l2 = 1e-4;
  double tol = 1e-8;
  int max_iter = 1000;
};

struct ForestConfig {
  std::size_t trees = 100;
  /// Features tried per split; default ceil(sqrt(p)).
  std::optional<std::size_t> mtry;
  std::size_t min_leaf = 1;
  bool bootstrap = true;
};

struct BoostConfig {
  std::size_t rounds = 100;
  std::size_t depth = 3;
  double learning_rate = 0.1;
  /// L2 penalty on leaf weights.
  double lambda = 1.0;
};

struct ModelConfig {
  LogisticConfig logistic;
  ForestConfig forest;
  BoostConfig boost;
  std::uint64_t seed = 17;

  /// Throws InvalidArgument on non-positive counts or a learning rate outside (0, 1].
  void validate() const;
};

enum class EstimatorKind { kPlugin, kLogistic, kForest, kBoost };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(const std::string& s);

/// Row-major categorical feature matrix with a binary target.
struct TrainingData {
  std::vector<std::string> feature_names;
  std::vector<std::size_t> cardinalities;
  std::vector<std::uint32_t> features;  // n * k
  std::vector<std::uint8_t> target;     // 0/1
  std::size_t n = 0;

  std::span<const std::uint32_t> row(std::size_t i) const {
    return {features.data() + i * cardinalities.size(), cardinalities.size()};
  }
  std::size_t n_features() const { return cardinalities.size(); }
};

/// Throws NonBinaryTarget, UnknownColumn, InvalidArgument (empty features).
TrainingData training_data(const Dataset& ds, const std::vector<std::string>& features, const std::string& target);

class OutcomeModel {
 public:
  virtual ~OutcomeModel() = default;
  /// P(target = 1 | features), in [0, 1].
  virtual double predict(std::span<const std::uint32_t> row) const = 0;
};

/// L2-penalized logistic regression on one-hot (reference level 0) features
/// plus intercept, fitted by damped Newton iterations.
class LogisticModel : public OutcomeModel {
 public:
  static LogisticModel fit(const TrainingData& data, const LogisticConfig& cfg);

  double predict(std::span<const std::uint32_t> row) const override;
  const std::vector<double>& weights() const { return weights_; }
  /// Penalized log-likelihood trace, one entry per accepted iterate.
  const std::vector<double>& objective_trace() const { return trace_; }
  int iterations() const { return static_cast<int>(trace_.size()) - 1; }

  /// sum_i log p(y_i | x_i, w) - (l2 / 2) * |w|^2.
  static double objective(const TrainingData& data, std::span<const double> w, double l2);
  static std::vector<double> gradient(const TrainingData& data, std::span<const double> w, double l2);
  static std::vector<double> design_row(const TrainingData& data, std::span<const std::uint32_t> row);

 private:
  std::vector<std::size_t> cardinalities_;
  std::vector<double> weights_;
  std::vector<double> trace_;
};

/// Flat binary tree over categorical features; a row goes left when
/// row[feature] <= threshold.
struct Tree {
  struct Node {
    int feature = -1;
    std::uint32_t threshold = 0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  std::vector<Node> nodes;

  double predict(std::span<const std::uint32_t> row) const;
  std::size_t depth() const;
};

struct TreeOptions {
  std::size_t mtry = 0;  // 0: all features
  std::size_t min_leaf = 1;
  std::optional<std::size_t> max_depth;
};

/// Gini classification tree on the given sample indices (repeats allowed).
/// importance (size n_features) accumulates (n_node / n_sample) * decrease.
Tree fit_classification_tree(const TrainingData& data, std::span<const std::size_t> sample, const TreeOptions& options,
                             Rng& rng, std::vector<double>* importance = nullptr);

class ForestModel : public OutcomeModel {
 public:
  static ForestModel fit(const TrainingData& data, const ForestConfig& cfg, std::uint64_t seed);

  double predict(std::span<const std::uint32_t> row) const override;
  const std::vector<Tree>& trees() const { return trees_; }
  /// Per-feature impurity decrease summed within each tree, averaged over
  /// trees (unnormalized).
  const std::vector<double>& raw_importance() const { return importance_; }

 private:
  std::vector<Tree> trees_;
  std::vector<double> importance_;
};

/// Additive second-order regression trees on the logistic loss.
class BoostModel : public OutcomeModel {
 public:
  static BoostModel fit(const TrainingData& data, const BoostConfig& cfg);

  double predict(std::span<const std::uint32_t> row) const override;
  double margin(std::span<const std::uint32_t> row) const;
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  double base_margin_ = 0.0;
  double learning_rate_ = 0.1;
  std::vector<Tree> trees_;
};

std::unique_ptr<OutcomeModel> fit_outcome_model(const Dataset& ds, const std::vector<std::string>& features,
                                                const std::string& target, EstimatorKind kind, const ModelConfig& cfg);
std::unique_ptr<OutcomeModel> fit_outcome_model(const TrainingData& data, EstimatorKind kind, const ModelConfig& cfg,
                                                std::uint64_t seed);

}  // namespace causal_cues
