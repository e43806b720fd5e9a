#include "causal_cues/stats.hpp"

#include "causal_cues/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

constexpr double kGammaTolerance = 1e-14;
constexpr int kGammaMaxIterations = 10000;

// Series expansion of P(a, x); converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kGammaMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kGammaTolerance) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x); x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kGammaTolerance) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_chi2_domain(double x, int dof) {
  if (!(x >= 0.0) || dof < 1) {
    throw CausalError(ErrorCode::kDomainError,
                      "chi2 requires x >= 0 and dof >= 1 (x=" + std::to_string(x) + ", dof=" + std::to_string(dof) + ")");
  }
}

std::vector<std::string> names_of(const Dataset& ds, std::span<const std::size_t> cols) {
  std::vector<std::string> out;
  for (auto c : cols) out.push_back(ds.name(c));
  return out;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi2_cdf(double x, int dof) {
  check_chi2_domain(x, dof);
  return std::clamp(regularized_gamma_p(0.5 * dof, 0.5 * x), 0.0, 1.0);
}

double chi2_sf(double x, int dof) {
  check_chi2_domain(x, dof);
  return std::clamp(regularized_gamma_q(0.5 * dof, 0.5 * x), 0.0, 1.0);
}

nlohmann::json to_json(const CITestResult& r) {
  return {{"x", r.x},
          {"y", r.y},
          {"conditioning_set", r.conditioning_set},
          {"statistic", r.statistic},
          {"dof", r.dof},
          {"p_value", r.p_value},
          {"independent", r.independent},
          {"insufficient_data", r.insufficient_data}};
}

CITestResult g2_test(const Dataset& ds, std::size_t x, std::size_t y, std::span<const std::size_t> z,
                     const CiOptions& options) {
  if (x >= ds.n_cols()) throw CausalError(ErrorCode::kUnknownColumn, "index " + std::to_string(x));
  if (y >= ds.n_cols()) throw CausalError(ErrorCode::kUnknownColumn, "index " + std::to_string(y));
  if (x == y) throw CausalError(ErrorCode::kOverlappingArguments, "x and y are the same column");
  for (auto c : z) {
    if (c >= ds.n_cols()) throw CausalError(ErrorCode::kUnknownColumn, "index " + std::to_string(c));
    if (c == x || c == y) throw CausalError(ErrorCode::kOverlappingArguments, ds.name(c) + " is both tested and conditioned on");
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw CausalError(ErrorCode::kDomainError, "alpha must lie in (0,1)");

  CITestResult r;
  r.x = ds.name(x);
  r.y = ds.name(y);
  r.conditioning_set = names_of(ds, z);

  // Strata-major layout: [z..., x, y].
  std::vector<std::size_t> cols(z.begin(), z.end());
  cols.push_back(x);
  cols.push_back(y);
  const ContingencyTable table = contingency(ds, std::span<const std::size_t>(cols));
  const std::size_t nx = ds.cardinality(x);
  const std::size_t ny = ds.cardinality(y);
  const std::size_t block = nx * ny;
  const std::size_t strata = table.counts.size() / block;

  double g2 = 0.0;
  long dof = 0;
  bool any_informative = false;
  bool any_nonempty = false;
  std::vector<double> row(nx), col(ny);
  for (std::size_t s = 0; s < strata; ++s) {
    const std::uint64_t* cell = table.counts.data() + s * block;
    std::fill(row.begin(), row.end(), 0.0);
    std::fill(col.begin(), col.end(), 0.0);
    double total = 0.0;
    for (std::size_t a = 0; a < nx; ++a) {
      for (std::size_t b = 0; b < ny; ++b) {
        const double o = static_cast<double>(cell[a * ny + b]);
        row[a] += o;
        col[b] += o;
        total += o;
      }
    }
    if (total == 0.0) continue;
    any_nonempty = true;
    if (total / static_cast<double>(block) >= options.min_average_cell_count) any_informative = true;
    for (std::size_t a = 0; a < nx; ++a) {
      for (std::size_t b = 0; b < ny; ++b) {
        const double o = static_cast<double>(cell[a * ny + b]);
        if (o > 0.0) g2 += o * std::log(o * total / (row[a] * col[b]));
      }
    }
    const long rows_nz = std::count_if(row.begin(), row.end(), [](double v) { return v > 0.0; });
    const long cols_nz = std::count_if(col.begin(), col.end(), [](double v) { return v > 0.0; });
    dof += std::max(0L, rows_nz - 1) * std::max(0L, cols_nz - 1);
  }
  g2 = std::max(0.0, 2.0 * g2);

  r.statistic = g2;
  r.dof = static_cast<int>(dof);
  r.p_value = dof > 0 ? chi2_sf(g2, r.dof) : 1.0;
  r.insufficient_data = any_nonempty && !any_informative;
  r.independent = r.insufficient_data ? options.insufficient_means_independent : (r.p_value > options.alpha);
  return r;
}

CITestResult g2_test(const Dataset& ds, const std::string& x, const std::string& y,
                     const std::vector<std::string>& z, const CiOptions& options) {
  const std::size_t xi = ds.column_index(x);
  const std::size_t yi = ds.column_index(y);
  const auto zi = ds.column_indices(z);
  return g2_test(ds, xi, yi, std::span<const std::size_t>(zi), options);
}

LocalScore local_bic(const Dataset& ds, std::size_t node, std::span<const std::size_t> parents) {
  if (node >= ds.n_cols()) throw CausalError(ErrorCode::kUnknownColumn, "index " + std::to_string(node));
  for (auto p : parents) {
    if (p >= ds.n_cols()) throw CausalError(ErrorCode::kUnknownColumn, "index " + std::to_string(p));
    if (p == node) throw CausalError(ErrorCode::kOverlappingArguments, ds.name(node) + " listed as its own parent");
  }
  LocalScore s;
  s.node = ds.name(node);
  s.parents = names_of(ds, parents);

  std::vector<std::size_t> cols(parents.begin(), parents.end());
  cols.push_back(node);
  const ContingencyTable table = contingency(ds, std::span<const std::size_t>(cols));
  const std::size_t r = ds.cardinality(node);
  const std::size_t q = table.counts.size() / r;

  double ll = 0.0;
  for (std::size_t st = 0; st < q; ++st) {
    const std::uint64_t* cell = table.counts.data() + st * r;
    std::uint64_t total = 0;
    for (std::size_t v = 0; v < r; ++v) total += cell[v];
    if (total == 0) continue;
    for (std::size_t v = 0; v < r; ++v) {
      if (cell[v] > 0) {
        const double c = static_cast<double>(cell[v]);
        ll += c * std::log(c / static_cast<double>(total));
      }
    }
  }
  s.log_likelihood = ll;
  s.k = (r - 1) * q;
  s.score = 2.0 * ll - static_cast<double>(s.k) * std::log(static_cast<double>(ds.n_rows()));
  return s;
}

LocalScore local_bic(const Dataset& ds, const std::string& node, const std::vector<std::string>& parents) {
  const std::size_t ni = ds.column_index(node);
  const auto pi = ds.column_indices(parents);
  return local_bic(ds, ni, std::span<const std::size_t>(pi));
}

BicScorer::BicScorer(const Dataset& ds) : ds_(ds) {
  if (ds.n_cols() > 32) throw CausalError(ErrorCode::kTooManyNodes, "score cache supports at most 32 columns");
}

double BicScorer::local(std::size_t node, std::uint32_t parent_mask) const {
  const auto key = std::make_pair(node, parent_mask);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::vector<std::size_t> parents;
  for (std::uint32_t m = parent_mask; m; m &= m - 1) parents.push_back(static_cast<std::size_t>(std::countr_zero(m)));
  const double value = local_bic(ds_, node, std::span<const std::size_t>(parents)).score;
  std::lock_guard lock(mutex_);
  cache_.emplace(key, value);
  return value;
}

}  // namespace causal_cues
