#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "causal_cues/dataset.hpp"

namespace causal_cues {

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed directly.
double regularized_gamma_q(double a, double x);

/// P(chi2_dof <= x). Throws DomainError for x < 0 or dof < 1.
double chi2_cdf(double x, int dof);
/// P(chi2_dof > x), accurate in the far tail.
double chi2_sf(double x, int dof);

struct CiOptions {
  double alpha = 0.05;
  /// Verdict reported when every stratum is too sparse to test.
  bool insufficient_means_independent = true;
  /// Minimum average count per (x, y) cell for a stratum to be informative.
  double min_average_cell_count = 5.0;
};

struct CITestResult {
  std::string x;
  std::string y;
  std::vector<std::string> conditioning_set;
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  bool independent = true;
  bool insufficient_data = false;
};

nlohmann::json to_json(const CITestResult& r);

/// G^2 likelihood-ratio test of x independent of y given z, on column indices.
CITestResult g2_test(const Dataset& ds, std::size_t x, std::size_t y, std::span<const std::size_t> z,
                     const CiOptions& options = {});
CITestResult g2_test(const Dataset& ds, const std::string& x, const std::string& y,
                     const std::vector<std::string>& z, const CiOptions& options = {});

struct LocalScore {
  std::string node;
  std::vector<std::string> parents;
  double log_likelihood = 0.0;
  std::size_t k = 0;
  /// 2 * log_likelihood - k * ln(n); higher is better.
  double score = 0.0;
};

LocalScore local_bic(const Dataset& ds, std::size_t node, std::span<const std::size_t> parents);
LocalScore local_bic(const Dataset& ds, const std::string& node, const std::vector<std::string>& parents);

/// Memoizing local score lookup keyed by (node, parent bitmask). Supports up
/// to 32 columns. Thread-safe.
class BicScorer {
 public:
  explicit BicScorer(const Dataset& ds);

  double local(std::size_t node, std::uint32_t parent_mask) const;
  const Dataset& data() const { return ds_; }

 private:
  const Dataset& ds_;
  mutable std::map<std::pair<std::size_t, std::uint32_t>, double> cache_;
  mutable std::mutex mutex_;
};

}  // namespace causal_cues
