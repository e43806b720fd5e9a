#include "causal_cues/estimate.hpp"

#include "causal_cues/error.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

void check_disjoint(const Dataset& ds, const std::string& x, const std::string& y, const std::vector<std::string>& z) {
  ds.column_index(x);
  ds.column_index(y);
  if (x == y) throw CausalError(ErrorCode::kOverlappingArguments, "treatment equals outcome");
  std::set<std::string> seen;
  for (const auto& v : z) {
    ds.column_index(v);
    if (v == x || v == y) throw CausalError(ErrorCode::kOverlappingArguments, v + " is in the adjustment set");
    if (!seen.insert(v).second) throw CausalError(ErrorCode::kDuplicateColumn, v);
  }
}

void check_treatment(const Dataset& ds, const std::string& x) {
  const std::size_t xi = ds.column_index(x);
  bool has0 = false, has1 = false;
  for (auto v : ds.column(xi)) {
    has0 |= v == 0;
    has1 |= v == 1;
  }
  if (!(has0 && has1)) {
    throw CausalError(ErrorCode::kDegenerateTreatment, x + " does not take both values 0 and 1");
  }
}

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos) s = s.substr(s[0] == '-' ? 1 : 0);
  return s;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

bool connected(const MixedGraph& g, std::size_t a, std::size_t b) {
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> stack{a};
  seen[a] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (v == b) return true;
    for (auto w : g.adjacent_nodes(v)) {
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return false;
}

std::string column_label(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::kLogistic: return "LR";
    case EstimatorKind::kForest: return "RFC";
    case EstimatorKind::kBoost: return "XGBC";
    case EstimatorKind::kPlugin: return "plugin";
  }
  return "?";
}

}  // namespace

EffectEstimate ace_plugin(const Dataset& ds, const std::string& x, const std::string& y,
                          const std::vector<std::string>& z, const PluginOptions& options) {
  check_disjoint(ds, x, y, z);
  check_treatment(ds, x);
  if (options.smoothing && !(*options.smoothing > 0.0)) {
    throw CausalError(ErrorCode::kInvalidArgument, "smoothing must be positive");
  }

  // Layout [z..., x, y].
  std::vector<std::size_t> cols = ds.column_indices(z);
  const std::size_t xi = ds.column_index(x), yi = ds.column_index(y);
  cols.push_back(xi);
  cols.push_back(yi);
  const ContingencyTable t = contingency(ds, std::span<const std::size_t>(cols));
  const std::size_t nx = ds.cardinality(xi), ny = ds.cardinality(yi);
  const std::size_t block = nx * ny;
  const std::size_t strata = t.counts.size() / block;
  const double n = static_cast<double>(ds.n_rows());

  // Marginal P(Y=1 | X=x) for the fallback.
  std::vector<double> arm_total(nx, 0.0), arm_pos(nx, 0.0);
  for (std::size_t s = 0; s < strata; ++s) {
    for (std::size_t a = 0; a < nx; ++a) {
      for (std::size_t b = 0; b < ny; ++b) arm_total[a] += static_cast<double>(t.counts[s * block + a * ny + b]);
      if (ny > 1) arm_pos[a] += static_cast<double>(t.counts[s * block + a * ny + 1]);
    }
  }

  EffectEstimate e;
  e.treatment = x;
  e.outcome = y;
  e.adjustment_set = z;
  e.estimator = EstimatorKind::kPlugin;
  double ace = 0.0;
  for (std::size_t s = 0; s < strata; ++s) {
    const std::uint64_t* cell = t.counts.data() + s * block;
    double stratum = 0.0;
    for (std::size_t k = 0; k < block; ++k) stratum += static_cast<double>(cell[k]);
    if (stratum == 0.0) continue;
    ++e.strata_used;
    bool fell_back = false;
    auto p_y1 = [&](std::size_t arm) {
      double total = 0.0;
      for (std::size_t b = 0; b < ny; ++b) total += static_cast<double>(cell[arm * ny + b]);
      const double pos = ny > 1 ? static_cast<double>(cell[arm * ny + 1]) : 0.0;
      if (options.smoothing) return (pos + *options.smoothing) / (total + static_cast<double>(ny) * *options.smoothing);
      if (total == 0.0) {
        fell_back = true;
        return arm_pos[arm] / arm_total[arm];
      }
      return pos / total;
    };
    ace += (p_y1(1) - p_y1(0)) * (stratum / n);
    if (fell_back) ++e.fallback_strata;
  }
  e.ace = ace;
  return e;
}

EffectEstimate ace_outcome_model(const Dataset& ds, const std::string& x, const std::string& y,
                                 const std::vector<std::string>& z, EstimatorKind kind, const ModelConfig& cfg) {
  check_disjoint(ds, x, y, z);
  check_treatment(ds, x);
  std::vector<std::string> features{x};
  features.insert(features.end(), z.begin(), z.end());
  const TrainingData data = training_data(ds, features, y);
  const auto model = fit_outcome_model(data, kind, cfg, cfg.seed);

  double sum = 0.0;
  std::vector<std::uint32_t> row(features.size());
  std::set<std::vector<std::uint32_t>> strata;
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto r = data.row(i);
    std::copy(r.begin(), r.end(), row.begin());
    strata.insert(std::vector<std::uint32_t>(row.begin() + 1, row.end()));
    row[0] = 1;
    const double treated = model->predict(row);
    row[0] = 0;
    const double control = model->predict(row);
    sum += treated - control;
  }
  EffectEstimate e;
  e.treatment = x;
  e.outcome = y;
  e.adjustment_set = z;
  e.estimator = kind;
  e.ace = sum / static_cast<double>(data.n);
  e.strata_used = strata.size();
  e.seed = cfg.seed;
  return e;
}

std::string to_string(EffectStatus status) {
  switch (status) {
    case EffectStatus::kEstimated: return "estimated";
    case EffectStatus::kNoPath: return "no path";
    case EffectStatus::kNotIdentifiable: return "not identifiable";
  }
  return "unknown";
}

const EffectEstimate* EffectRow::find(EstimatorKind kind) const {
  for (const auto& e : estimates) {
    if (e.estimator == kind) return &e;
  }
  return nullptr;
}

EffectTable effect_table(const Dataset& ds, const MixedGraph& g, const std::string& outcome,
                         const EffectTableOptions& options) {
  const std::size_t yi = g.index_of(outcome);
  for (const auto& n : g.nodes()) ds.column_index(n);
  if (options.treatment) {
    g.index_of(*options.treatment);
    if (*options.treatment == outcome) {
      throw CausalError(ErrorCode::kOverlappingArguments, "treatment equals outcome");
    }
  }

  EffectTable table;
  table.outcome = outcome;
  for (std::size_t xi = 0; xi < g.size(); ++xi) {
    if (xi == yi) continue;
    if (options.treatment && g.node(xi) != *options.treatment) continue;
    EffectRow row;
    row.treatment = g.node(xi);
    if (!connected(g, xi, yi)) {
      row.status = EffectStatus::kNoPath;
      table.rows.push_back(std::move(row));
      continue;
    }
    const AdjustmentReport report = valid_adjustment_sets(g, xi, yi, options.policy);
    row.notes = report.notes;
    const NodeSet* set = report.first_minimal();
    if (!set) {
      row.status = EffectStatus::kNotIdentifiable;
      table.rows.push_back(std::move(row));
      continue;
    }
    for (auto v : *set) row.adjustment_set.push_back(g.node(v));

    const std::uint64_t column = ds.column_index(row.treatment);
    for (EstimatorKind kind : options.estimators) {
      if (kind == EstimatorKind::kPlugin) {
        row.estimates.push_back(ace_plugin(ds, row.treatment, outcome, row.adjustment_set, options.plugin));
      } else {
        ModelConfig cfg = options.models;
        cfg.seed = derive_seed(options.models.seed, {column, static_cast<std::uint64_t>(kind)});
        row.estimates.push_back(ace_outcome_model(ds, row.treatment, outcome, row.adjustment_set, kind, cfg));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_effect_table(const EffectTable& table, const std::vector<EstimatorKind>& columns) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"Causal Effect Relationship", "Adjustment Set"};
  for (auto k : columns) header.push_back(column_label(k));
  cells.push_back(header);
  for (const auto& r : table.rows) {
    std::vector<std::string> line{r.treatment + " => " + table.outcome};
    if (r.status != EffectStatus::kEstimated) {
      line.push_back(to_string(r.status));
      for (std::size_t k = 0; k < columns.size(); ++k) line.push_back("-");
    } else {
      line.push_back(r.adjustment_set.empty() ? "{ }" : "{" + join(r.adjustment_set, ", ") + "}");
      for (auto k : columns) {
        const auto* e = r.find(k);
        line.push_back(e ? fmt(e->ace, 3) : "-");
      }
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  std::ostringstream out;
  for (std::size_t l = 0; l < cells.size(); ++l) {
    for (std::size_t c = 0; c < cells[l].size(); ++c) {
      out << (c ? "  " : "") << cells[l][c] << std::string(width[c] - cells[l][c].size(), ' ');
    }
    out << '\n';
    if (l == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
  return out.str();
}

std::string effect_table_csv(const EffectTable& table, const std::vector<EstimatorKind>& columns) {
  std::ostringstream out;
  out << "treatment,outcome,adjustment_set,estimator,ace,strata_used,fallback_strata,seed,status\n";
  for (const auto& r : table.rows) {
    for (auto k : columns) {
      const auto* e = r.find(k);
      out << r.treatment << ',' << table.outcome << ',' << join(r.adjustment_set, ";") << ',' << to_string(k) << ',';
      if (e) {
        out << fmt(e->ace, 6) << ',' << e->strata_used << ',' << e->fallback_strata << ','
            << (e->seed ? std::to_string(*e->seed) : "");
      } else {
        out << ",,,";
      }
      out << ',' << to_string(r.status) << '\n';
    }
  }
  return out.str();
}

nlohmann::json to_json(const EffectTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json est = nlohmann::json::array();
    for (const auto& e : r.estimates) {
      est.push_back({{"estimator", to_string(e.estimator)},
                     {"ace", e.ace},
                     {"strata_used", e.strata_used},
                     {"fallback_strata", e.fallback_strata},
                     {"seed", e.seed ? nlohmann::json(*e.seed) : nlohmann::json(nullptr)}});
    }
    rows.push_back({{"treatment", r.treatment},
                    {"status", to_string(r.status)},
                    {"adjustment_set", r.adjustment_set},
                    {"estimates", est},
                    {"notes", r.notes}});
  }
  return {{"outcome", table.outcome}, {"rows", rows}};
}

}  // namespace causal_cues
