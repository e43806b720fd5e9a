#include "causal_cues/models.hpp"

#include "causal_cues/error.hpp"
#include "causal_cues/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Dense>

namespace causal_cues {

namespace {

constexpr double kMinGain = 1e-12;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double gini(double ones, double total) {
  if (total <= 0) return 0.0;
  const double p = ones / total;
  return 2.0 * p * (1.0 - p);
}

std::vector<std::size_t> pick_features(std::size_t k, std::size_t mtry, Rng& rng) {
  std::vector<std::size_t> all(k);
  std::iota(all.begin(), all.end(), 0);
  if (mtry == 0 || mtry >= k) return all;
  for (std::size_t i = 0; i < mtry; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(k - i));
    std::swap(all[i], all[j]);
  }
  all.resize(mtry);
  std::sort(all.begin(), all.end());
  return all;
}

struct ClassSplit {
  int feature = -1;
  std::uint32_t threshold = 0;
  double gain = 0.0;
};

class ClassificationBuilder {
 public:
  ClassificationBuilder(const TrainingData& data, const TreeOptions& options, Rng& rng, std::vector<double>* importance,
                        double root_size)
      : data_(data), options_(options), rng_(rng), importance_(importance), root_size_(root_size) {}

  int build(std::vector<std::size_t>& idx, std::size_t depth, Tree& tree) {
    const double m = static_cast<double>(idx.size());
    double ones = 0;
    for (auto i : idx) ones += data_.target[i];
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({-1, 0, -1, -1, m > 0 ? ones / m : 0.0});

    const bool pure = ones == 0 || ones == m;
    const bool depth_capped = options_.max_depth && depth >= *options_.max_depth;
    if (pure || depth_capped || idx.size() < 2 * options_.min_leaf) return node_id;

    const ClassSplit split = best_split(idx, ones);
    if (split.feature < 0) return node_id;
    if (importance_) (*importance_)[split.feature] += (m / root_size_) * split.gain;

    std::vector<std::size_t> left, right;
    for (auto i : idx) {
      (data_.row(i)[split.feature] <= split.threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    tree.nodes[node_id].feature = split.feature;
    tree.nodes[node_id].threshold = split.threshold;
    const int l = build(left, depth + 1, tree);
    tree.nodes[node_id].left = l;
    const int r = build(right, depth + 1, tree);
    tree.nodes[node_id].right = r;
    return node_id;
  }

 private:
  ClassSplit best_split(const std::vector<std::size_t>& idx, double ones) {
    const double m = static_cast<double>(idx.size());
    const double parent = gini(ones, m);
    ClassSplit best;
    for (std::size_t f : pick_features(data_.n_features(), options_.mtry, rng_)) {
      const std::size_t c = data_.cardinalities[f];
      std::vector<double> cnt(c, 0.0), pos(c, 0.0);
      for (auto i : idx) {
        const auto v = data_.row(i)[f];
        cnt[v] += 1;
        pos[v] += data_.target[i];
      }
      double nl = 0, ol = 0;
      for (std::size_t t = 0; t + 1 < c; ++t) {
        nl += cnt[t];
        ol += pos[t];
        const double nr = m - nl, orr = ones - ol;
        if (nl < options_.min_leaf || nr < options_.min_leaf) continue;
        const double gain = parent - (nl / m) * gini(ol, nl) - (nr / m) * gini(orr, nr);
        if (gain > kMinGain && gain > best.gain + kMinGain) {
          best = {static_cast<int>(f), static_cast<std::uint32_t>(t), gain};
        }
      }
    }
    return best;
  }

  const TrainingData& data_;
  const TreeOptions& options_;
  Rng& rng_;
  std::vector<double>* importance_;
  double root_size_;
};

// Second-order regression tree on gradients g and hessians h.
class GradientBuilder {
 public:
  GradientBuilder(const TrainingData& data, const std::vector<double>& g, const std::vector<double>& h,
                  std::size_t max_depth, double lambda)
      : data_(data), g_(g), h_(h), max_depth_(max_depth), lambda_(lambda) {}

  int build(std::vector<std::size_t>& idx, std::size_t depth, Tree& tree) {
    double G = 0, H = 0;
    for (auto i : idx) {
      G += g_[i];
      H += h_[i];
    }
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({-1, 0, -1, -1, -G / (H + lambda_)});
    if (depth >= max_depth_ || idx.size() < 2) return node_id;

    int best_f = -1;
    std::uint32_t best_t = 0;
    double best_gain = kMinGain;
    const double parent = G * G / (H + lambda_);
    for (std::size_t f = 0; f < data_.n_features(); ++f) {
      const std::size_t c = data_.cardinalities[f];
      std::vector<double> gs(c, 0.0), hs(c, 0.0), ns(c, 0.0);
      for (auto i : idx) {
        const auto v = data_.row(i)[f];
        gs[v] += g_[i];
        hs[v] += h_[i];
        ns[v] += 1;
      }
      double gl = 0, hl = 0, nl = 0;
      for (std::size_t t = 0; t + 1 < c; ++t) {
        gl += gs[t];
        hl += hs[t];
        nl += ns[t];
        if (nl < 1 || nl > static_cast<double>(idx.size()) - 1) continue;
        const double gr = G - gl, hr = H - hl;
        const double gain = gl * gl / (hl + lambda_) + gr * gr / (hr + lambda_) - parent;
        if (gain > best_gain + kMinGain) {
          best_gain = gain;
          best_f = static_cast<int>(f);
          best_t = static_cast<std::uint32_t>(t);
        }
      }
    }
    if (best_f < 0) return node_id;
    std::vector<std::size_t> left, right;
    for (auto i : idx) (data_.row(i)[best_f] <= best_t ? left : right).push_back(i);
    tree.nodes[node_id].feature = best_f;
    tree.nodes[node_id].threshold = best_t;
    const int l = build(left, depth + 1, tree);
    tree.nodes[node_id].left = l;
    const int r = build(right, depth + 1, tree);
    tree.nodes[node_id].right = r;
    return node_id;
  }

 private:
  const TrainingData& data_;
  const std::vector<double>& g_;
  const std::vector<double>& h_;
  std::size_t max_depth_;
  double lambda_;
};

}  // namespace

void ModelConfig::validate() const {
  if (!(logistic.l2 >= 0.0) || !(logistic.tol > 0.0) || logistic.max_iter <= 0) {
    throw CausalError(ErrorCode::kInvalidArgument, "logistic config needs l2 >= 0, tol > 0, max_iter > 0");
  }
  if (forest.trees == 0 || forest.min_leaf == 0 || (forest.mtry && *forest.mtry == 0)) {
    throw CausalError(ErrorCode::kInvalidArgument, "forest config counts must be positive");
  }
  if (boost.rounds == 0 || boost.depth == 0) {
    throw CausalError(ErrorCode::kInvalidArgument, "boost config counts must be positive");
  }
  if (!(boost.learning_rate > 0.0 && boost.learning_rate <= 1.0)) {
    throw CausalError(ErrorCode::kInvalidArgument, "learning rate must lie in (0, 1]");
  }
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kPlugin: return "plugin";
    case EstimatorKind::kLogistic: return "logistic";
    case EstimatorKind::kForest: return "forest";
    case EstimatorKind::kBoost: return "boost";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(const std::string& s) {
  if (s == "plugin") return EstimatorKind::kPlugin;
  if (s == "logistic" || s == "lr") return EstimatorKind::kLogistic;
  if (s == "forest" || s == "rfc") return EstimatorKind::kForest;
  if (s == "boost" || s == "xgbc") return EstimatorKind::kBoost;
  throw CausalError(ErrorCode::kInvalidArgument, "unknown estimator '" + s + "'");
}

TrainingData training_data(const Dataset& ds, const std::vector<std::string>& features, const std::string& target) {
  if (features.empty()) throw CausalError(ErrorCode::kInvalidArgument, "outcome model needs at least one feature");
  const std::size_t t = ds.column_index(target);
  if (ds.cardinality(t) > 2) {
    throw CausalError(ErrorCode::kNonBinaryTarget, target + " has " + std::to_string(ds.cardinality(t)) + " levels");
  }
  const auto cols = ds.column_indices(features);
  TrainingData d;
  d.feature_names = features;
  for (auto c : cols) {
    if (c == t) throw CausalError(ErrorCode::kOverlappingArguments, target + " used as both feature and target");
    d.cardinalities.push_back(ds.cardinality(c));
  }
  d.n = ds.n_rows();
  d.features.resize(d.n * cols.size());
  d.target.resize(d.n);
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) d.features[i * cols.size() + k] = ds.value(i, cols[k]);
    d.target[i] = static_cast<std::uint8_t>(ds.value(i, t));
  }
  return d;
}

std::vector<double> LogisticModel::design_row(const TrainingData& data, std::span<const std::uint32_t> row) {
  std::vector<double> x{1.0};
  for (std::size_t k = 0; k < data.n_features(); ++k) {
    for (std::uint32_t level = 1; level < data.cardinalities[k]; ++level) x.push_back(row[k] == level ? 1.0 : 0.0);
  }
  return x;
}

double LogisticModel::objective(const TrainingData& data, std::span<const double> w, double l2) {
  double ll = 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto x = design_row(data, data.row(i));
    const double z = std::inner_product(x.begin(), x.end(), w.begin(), 0.0);
    // log sigma(z) = -log(1 + e^-z), log(1 - sigma(z)) = -log(1 + e^z)
    ll -= data.target[i] ? std::log1p(std::exp(-std::fabs(z))) + std::max(0.0, -z)
                         : std::log1p(std::exp(-std::fabs(z))) + std::max(0.0, z);
  }
  double sq = 0.0;
  for (double v : w) sq += v * v;
  return ll - 0.5 * l2 * sq;
}

std::vector<double> LogisticModel::gradient(const TrainingData& data, std::span<const double> w, double l2) {
  std::vector<double> grad(w.size(), 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto x = design_row(data, data.row(i));
    const double z = std::inner_product(x.begin(), x.end(), w.begin(), 0.0);
    const double r = static_cast<double>(data.target[i]) - sigmoid(z);
    for (std::size_t j = 0; j < x.size(); ++j) grad[j] += r * x[j];
  }
  for (std::size_t j = 0; j < w.size(); ++j) grad[j] -= l2 * w[j];
  return grad;
}

LogisticModel LogisticModel::fit(const TrainingData& data, const LogisticConfig& cfg) {
  LogisticModel model;
  model.cardinalities_ = data.cardinalities;
  const std::size_t d = design_row(data, data.row(0)).size();

  // Rows are categorical, so group identical design rows.
  std::vector<std::vector<double>> xs;
  std::vector<double> count, positives;
  {
    std::vector<std::pair<std::vector<std::uint32_t>, std::size_t>> keys;
    std::vector<std::size_t> order(data.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto ra = data.row(a), rb = data.row(b);
      return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
    });
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto r = data.row(order[k]);
      if (k == 0 || !std::equal(r.begin(), r.end(), data.row(order[k - 1]).begin())) {
        xs.push_back(design_row(data, r));
        count.push_back(0);
        positives.push_back(0);
      }
      count.back() += 1;
      positives.back() += data.target[order[k]];
    }
  }

  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  auto objective_of = [&](const Eigen::VectorXd& v) {
    double ll = 0.0;
    for (std::size_t g = 0; g < xs.size(); ++g) {
      double z = 0.0;
      for (std::size_t j = 0; j < d; ++j) z += xs[g][j] * v[static_cast<Eigen::Index>(j)];
      const double soft = std::log1p(std::exp(-std::fabs(z)));
      ll -= positives[g] * (soft + std::max(0.0, -z)) + (count[g] - positives[g]) * (soft + std::max(0.0, z));
    }
    return ll - 0.5 * cfg.l2 * v.squaredNorm();
  };

  double obj = objective_of(w);
  model.trace_.push_back(obj);
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    Eigen::VectorXd grad = -cfg.l2 * w;
    Eigen::MatrixXd info = cfg.l2 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t g = 0; g < xs.size(); ++g) {
      const Eigen::Map<const Eigen::VectorXd> x(xs[g].data(), static_cast<Eigen::Index>(d));
      const double p = sigmoid(x.dot(w));
      grad += (positives[g] - count[g] * p) * x;
      info += count[g] * p * (1.0 - p) * x * x.transpose();
    }
    if (grad.cwiseAbs().maxCoeff() < cfg.tol) break;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw CausalError(ErrorCode::kSingularFit, "logistic information matrix is not positive definite");
    }
    const Eigen::VectorXd step = ldlt.solve(grad);
    double scale = 1.0;
    bool accepted = false;
    Eigen::VectorXd next;
    double next_obj = obj;
    for (int halving = 0; halving < 60; ++halving) {
      next = w + scale * step;
      next_obj = objective_of(next);
      if (next_obj >= obj) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;
    const double moved = (scale * step).cwiseAbs().maxCoeff();
    w = next;
    obj = next_obj;
    model.trace_.push_back(obj);
    if (moved < cfg.tol) break;
  }
  model.weights_.assign(w.data(), w.data() + w.size());
  return model;
}

double LogisticModel::predict(std::span<const std::uint32_t> row) const {
  double z = weights_[0];
  std::size_t j = 1;
  for (std::size_t k = 0; k < cardinalities_.size(); ++k) {
    for (std::uint32_t level = 1; level < cardinalities_[k]; ++level, ++j) {
      if (row[k] == level) z += weights_[j];
    }
  }
  return sigmoid(z);
}

double Tree::predict(std::span<const std::uint32_t> row) const {
  int id = 0;
  while (nodes[id].feature >= 0) id = row[nodes[id].feature] <= nodes[id].threshold ? nodes[id].left : nodes[id].right;
  return nodes[id].value;
}

std::size_t Tree::depth() const {
  std::function<std::size_t(int)> rec = [&](int id) -> std::size_t {
    if (nodes[id].feature < 0) return 0;
    return 1 + std::max(rec(nodes[id].left), rec(nodes[id].right));
  };
  return nodes.empty() ? 0 : rec(0);
}

Tree fit_classification_tree(const TrainingData& data, std::span<const std::size_t> sample, const TreeOptions& options,
                             Rng& rng, std::vector<double>* importance) {
  if (sample.empty()) throw CausalError(ErrorCode::kInvalidArgument, "tree needs at least one sample");
  if (importance) importance->assign(data.n_features(), 0.0);
  Tree tree;
  std::vector<std::size_t> idx(sample.begin(), sample.end());
  ClassificationBuilder builder(data, options, rng, importance, static_cast<double>(sample.size()));
  builder.build(idx, 0, tree);
  return tree;
}

ForestModel ForestModel::fit(const TrainingData& data, const ForestConfig& cfg, std::uint64_t seed) {
  if (data.n == 0) throw CausalError(ErrorCode::kInvalidArgument, "forest needs data");
  ForestModel model;
  const std::size_t k = data.n_features();
  TreeOptions opts;
  opts.mtry = cfg.mtry.value_or(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(k)))));
  opts.min_leaf = cfg.min_leaf;

  model.trees_.resize(cfg.trees);
  std::vector<std::vector<double>> per_tree(cfg.trees);
  parallel_for(cfg.trees, [&](std::size_t t) {
    Rng rng(derive_seed(seed, {t}));
    std::vector<std::size_t> sample(data.n);
    if (cfg.bootstrap) {
      for (auto& s : sample) s = static_cast<std::size_t>(rng.below(data.n));
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    model.trees_[t] = fit_classification_tree(data, sample, opts, rng, &per_tree[t]);
  });
  model.importance_.assign(k, 0.0);
  for (const auto& imp : per_tree) {
    for (std::size_t f = 0; f < k; ++f) model.importance_[f] += imp[f];
  }
  for (auto& v : model.importance_) v /= static_cast<double>(cfg.trees);
  return model;
}

double ForestModel::predict(std::span<const std::uint32_t> row) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict(row);
  return s / static_cast<double>(trees_.size());
}

BoostModel BoostModel::fit(const TrainingData& data, const BoostConfig& cfg) {
  if (data.n == 0) throw CausalError(ErrorCode::kInvalidArgument, "boosting needs data");
  BoostModel model;
  model.learning_rate_ = cfg.learning_rate;
  double mean = 0.0;
  for (auto y : data.target) mean += y;
  mean = std::clamp(mean / static_cast<double>(data.n), 1e-6, 1.0 - 1e-6);
  model.base_margin_ = std::log(mean / (1.0 - mean));

  std::vector<double> margin(data.n, model.base_margin_), g(data.n), h(data.n);
  std::vector<std::size_t> all(data.n);
  for (std::size_t round = 0; round < cfg.rounds; ++round) {
    for (std::size_t i = 0; i < data.n; ++i) {
      const double p = sigmoid(margin[i]);
      g[i] = p - data.target[i];
      h[i] = std::max(p * (1.0 - p), 1e-16);
    }
    std::iota(all.begin(), all.end(), 0);
    Tree tree;
    GradientBuilder builder(data, g, h, cfg.depth, cfg.lambda);
    builder.build(all, 0, tree);
    for (std::size_t i = 0; i < data.n; ++i) margin[i] += cfg.learning_rate * tree.predict(data.row(i));
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

double BoostModel::margin(std::span<const std::uint32_t> row) const {
  double m = base_margin_;
  for (const auto& t : trees_) m += learning_rate_ * t.predict(row);
  return m;
}

double BoostModel::predict(std::span<const std::uint32_t> row) const { return sigmoid(margin(row)); }

std::unique_ptr<OutcomeModel> fit_outcome_model(const TrainingData& data, EstimatorKind kind, const ModelConfig& cfg,
                                                std::uint64_t seed) {
  cfg.validate();
  switch (kind) {
    case EstimatorKind::kLogistic: return std::make_unique<LogisticModel>(LogisticModel::fit(data, cfg.logistic));
    case EstimatorKind::kForest: return std::make_unique<ForestModel>(ForestModel::fit(data, cfg.forest, seed));
    case EstimatorKind::kBoost: return std::make_unique<BoostModel>(BoostModel::fit(data, cfg.boost));
    case EstimatorKind::kPlugin: break;
  }
  throw CausalError(ErrorCode::kInvalidArgument, "the plug-in estimator has no outcome model");
}

std::unique_ptr<OutcomeModel> fit_outcome_model(const Dataset& ds, const std::vector<std::string>& features,
                                                const std::string& target, EstimatorKind kind, const ModelConfig& cfg) {
  return fit_outcome_model(training_data(ds, features, target), kind, cfg, cfg.seed);
}

}  // namespace causal_cues
