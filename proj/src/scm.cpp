#include "causal_cues/scm.hpp"

#include "causal_cues/error.hpp"
#include "causal_cues/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

constexpr std::size_t kMaxJointStates = std::size_t{1} << 20;

std::size_t joint_states(const ScmSpec& spec) {
  std::size_t states = 1;
  for (auto c : spec.cardinalities) {
    if (states > kMaxJointStates / c) {
      throw CausalError(ErrorCode::kStateSpaceTooLarge, "joint state space exceeds 2^20");
    }
    states *= c;
  }
  if (states > kMaxJointStates) throw CausalError(ErrorCode::kStateSpaceTooLarge, "joint state space exceeds 2^20");
  return states;
}

// Calls visit(assignment, probability) for every joint state. When
// intervention is set, the intervened node is clamped and its CPT skipped.
template <class Visit>
void enumerate(const ScmSpec& spec, std::optional<std::pair<std::size_t, std::uint32_t>> intervention, Visit visit) {
  const std::size_t p = spec.dag.size();
  const std::size_t states = joint_states(spec);
  std::vector<std::uint32_t> a(p, 0);
  for (std::size_t s = 0; s < states; ++s) {
    std::size_t rest = s;
    for (std::size_t v = p; v-- > 0;) {
      a[v] = static_cast<std::uint32_t>(rest % spec.cardinalities[v]);
      rest /= spec.cardinalities[v];
    }
    double prob = 1.0;
    for (std::size_t v = 0; v < p && prob > 0.0; ++v) {
      if (intervention && intervention->first == v) {
        prob *= a[v] == intervention->second ? 1.0 : 0.0;
      } else {
        prob *= spec.cpts[v][spec.parent_row(v, a)][a[v]];
      }
    }
    if (prob > 0.0) visit(a, prob);
  }
}

ScmSpec make(std::vector<std::string> nodes, const std::vector<std::pair<std::string, std::string>>& edges,
             const std::vector<std::pair<std::string, std::vector<double>>>& p_one) {
  ScmSpec spec;
  spec.dag = MixedGraph(std::move(nodes));
  for (const auto& [a, b] : edges) spec.dag.add_directed(spec.dag.index_of(a), spec.dag.index_of(b));
  spec.cardinalities.assign(spec.dag.size(), 2);
  spec.cpts.resize(spec.dag.size());
  for (const auto& [name, ones] : p_one) {
    auto& rows = spec.cpts[spec.dag.index_of(name)];
    for (double q : ones) rows.push_back({1.0 - q, q});
  }
  spec.validate();
  return spec;
}

}  // namespace

void ScmSpec::validate() const {
  const std::size_t p = dag.size();
  if (p == 0) throw CausalError(ErrorCode::kInvalidSpec, "model has no nodes");
  if (!dag.is_dag()) throw CausalError(ErrorCode::kInvalidSpec, "graph must be fully directed and acyclic");
  if (cardinalities.size() != p || cpts.size() != p) {
    throw CausalError(ErrorCode::kInvalidSpec, "cardinalities and CPTs must cover every node");
  }
  for (std::size_t v = 0; v < p; ++v) {
    if (cardinalities[v] < 1) throw CausalError(ErrorCode::kInvalidSpec, dag.node(v) + " has cardinality 0");
    std::size_t rows = 1;
    for (auto u : dag.parents(v)) rows *= cardinalities[u];
    if (cpts[v].size() != rows) {
      throw CausalError(ErrorCode::kInvalidSpec, dag.node(v) + " CPT has " + std::to_string(cpts[v].size()) +
                                                     " rows, expected " + std::to_string(rows));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      const auto& row = cpts[v][r];
      if (row.size() != cardinalities[v]) {
        throw CausalError(ErrorCode::kInvalidSpec, dag.node(v) + " CPT row " + std::to_string(r) + " has wrong width");
      }
      double sum = 0.0;
      for (double q : row) {
        if (!(q >= 0.0 && q <= 1.0)) {
          throw CausalError(ErrorCode::kInvalidSpec, dag.node(v) + " CPT entry outside [0, 1]");
        }
        sum += q;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw CausalError(ErrorCode::kInvalidSpec, dag.node(v) + " CPT row " + std::to_string(r) + " does not sum to 1");
      }
    }
  }
}

std::size_t ScmSpec::parent_row(std::size_t node, const std::vector<std::uint32_t>& assignment) const {
  std::size_t r = 0;
  for (auto u : dag.parents(node)) r = r * cardinalities[u] + assignment[u];
  return r;
}

ScmSpec scm_from_json(const nlohmann::json& j) {
  try {
    ScmSpec spec;
    spec.dag = MixedGraph(j.at("nodes").get<std::vector<std::string>>());
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
      const auto pair = e.get<std::vector<std::string>>();
      if (pair.size() != 2) throw CausalError(ErrorCode::kInvalidSpec, "edge must be [from, to]");
      const std::size_t a = spec.dag.index_of(pair[0]), b = spec.dag.index_of(pair[1]);
      if (spec.dag.adjacent(a, b)) throw CausalError(ErrorCode::kInvalidSpec, "duplicate edge " + pair[0] + " - " + pair[1]);
      spec.dag.add_directed(a, b);
    }
    spec.cardinalities.assign(spec.dag.size(), 2);
    if (j.contains("cardinalities")) {
      for (const auto& [name, k] : j.at("cardinalities").items()) {
        spec.cardinalities[spec.dag.index_of(name)] = k.get<std::size_t>();
      }
    }
    spec.cpts.resize(spec.dag.size());
    const auto& cpts = j.at("cpts");
    for (std::size_t v = 0; v < spec.dag.size(); ++v) {
      if (!cpts.contains(spec.dag.node(v))) throw CausalError(ErrorCode::kInvalidSpec, "missing CPT for " + spec.dag.node(v));
      spec.cpts[v] = cpts.at(spec.dag.node(v)).get<std::vector<std::vector<double>>>();
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw CausalError(ErrorCode::kInvalidSpec, e.what());
  } catch (const CausalError& e) {
    if (e.code() == ErrorCode::kInvalidSpec) throw;
    throw CausalError(ErrorCode::kInvalidSpec, e.what());
  }
}

nlohmann::json to_json(const ScmSpec& spec) {
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : spec.dag.directed_edges()) edges.push_back({spec.dag.node(a), spec.dag.node(b)});
  nlohmann::json cards = nlohmann::json::object();
  nlohmann::json cpts = nlohmann::json::object();
  for (std::size_t v = 0; v < spec.dag.size(); ++v) {
    cards[spec.dag.node(v)] = spec.cardinalities[v];
    cpts[spec.dag.node(v)] = spec.cpts[v];
  }
  return {{"nodes", spec.dag.nodes()}, {"cardinalities", cards}, {"edges", edges}, {"cpts", cpts}};
}

ScmSpec load_scm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CausalError(ErrorCode::kMissingFile, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CausalError(ErrorCode::kMalformedJson, path + ": " + e.what());
  }
  return scm_from_json(j);
}

Dataset sample(const ScmSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw CausalError(ErrorCode::kInvalidArgument, "sample size must be at least 1");
  const std::size_t p = spec.dag.size();
  const auto order = *spec.dag.topological_order();
  std::vector<std::vector<std::uint32_t>> cols(p, std::vector<std::uint32_t>(n));
  std::vector<Rng> streams;
  for (std::size_t v = 0; v < p; ++v) streams.emplace_back(derive_seed(seed, {v}));
  std::vector<std::uint32_t> a(p, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto v : order) {
      const auto& row = spec.cpts[v][spec.parent_row(v, a)];
      const double u = streams[v].uniform();
      std::uint32_t value = static_cast<std::uint32_t>(row.size() - 1);
      double acc = 0.0;
      for (std::size_t k = 0; k + 1 < row.size(); ++k) {
        acc += row[k];
        if (u < acc) {
          value = static_cast<std::uint32_t>(k);
          break;
        }
      }
      // A trailing zero-probability level must never be drawn.
      while (value > 0 && row[value] == 0.0) --value;
      a[v] = value;
      cols[v][i] = value;
    }
  }
  std::optional<std::string> outcome;
  if (spec.dag.has_node("label")) outcome = "label";
  return Dataset(spec.dag.nodes(), spec.cardinalities, std::move(cols), outcome);
}

std::vector<double> exact_joint(const ScmSpec& spec) {
  spec.validate();
  std::vector<double> joint(joint_states(spec), 0.0);
  enumerate(spec, std::nullopt, [&](const std::vector<std::uint32_t>& a, double prob) {
    std::size_t idx = 0;
    for (std::size_t v = 0; v < a.size(); ++v) idx = idx * spec.cardinalities[v] + a[v];
    joint[idx] = prob;
  });
  return joint;
}

std::vector<double> exact_marginal(const ScmSpec& spec, std::size_t node) {
  spec.validate();
  if (node >= spec.dag.size()) throw CausalError(ErrorCode::kUnknownNode, "node index out of range");
  std::vector<double> m(spec.cardinalities[node], 0.0);
  enumerate(spec, std::nullopt, [&](const std::vector<std::uint32_t>& a, double prob) { m[a[node]] += prob; });
  return m;
}

double true_ace(const ScmSpec& spec, std::size_t x, std::size_t y) {
  spec.validate();
  if (x >= spec.dag.size() || y >= spec.dag.size()) throw CausalError(ErrorCode::kUnknownNode, "node index out of range");
  if (x == y) throw CausalError(ErrorCode::kOverlappingArguments, "treatment equals outcome");
  if (spec.cardinalities[x] != 2 || spec.cardinalities[y] != 2) {
    throw CausalError(ErrorCode::kInvalidArgument, "true_ace needs binary treatment and outcome");
  }
  joint_states(spec);
  // Exactly zero rather than a difference of two rounded sums.
  const NodeSet desc = descendants(spec.dag, x);
  if (!std::binary_search(desc.begin(), desc.end(), y)) return 0.0;
  double p[2] = {0.0, 0.0};
  for (std::uint32_t xv = 0; xv < 2; ++xv) {
    enumerate(spec, std::make_pair(x, xv), [&](const std::vector<std::uint32_t>& a, double prob) {
      if (a[y] == 1) p[xv] += prob;
    });
  }
  return p[1] - p[0];
}

double true_ace(const ScmSpec& spec, const std::string& x, const std::string& y) {
  return true_ace(spec, spec.dag.index_of(x), spec.dag.index_of(y));
}

ScmSpec scm_fixture(const std::string& name) {
  if (name == "chain") {
    return make({"x", "w", "y"}, {{"x", "w"}, {"w", "y"}}, {{"x", {0.5}}, {"w", {0.1, 0.9}}, {"y", {0.1, 0.9}}});
  }
  if (name == "collider") {
    return make({"a", "b", "c"}, {{"a", "b"}, {"c", "b"}},
                {{"a", {0.5}}, {"c", {0.5}}, {"b", {0.1, 0.5, 0.5, 0.9}}});
  }
  if (name == "confounder") {
    // Parents of y in node order (z, x): rows 00, 01, 10, 11.
    return make({"z", "x", "y"}, {{"z", "x"}, {"z", "y"}, {"x", "y"}},
                {{"z", {0.4}}, {"x", {0.25, 0.7}}, {"y", {0.15, 0.55, 0.5, 0.9}}});
  }
  if (name == "fig3") {
    return make({"breath", "pitch_anomaly", "audio_quality_anomaly", "pause_anomaly", "burst_anomaly", "label"},
                {{"audio_quality_anomaly", "label"},
                 {"audio_quality_anomaly", "breath"},
                 {"audio_quality_anomaly", "pitch_anomaly"},
                 {"pitch_anomaly", "pause_anomaly"}},
                {{"audio_quality_anomaly", {0.5}},
                 {"label", {0.15, 0.85}},
                 {"breath", {0.75, 0.25}},
                 {"pitch_anomaly", {0.2, 0.75}},
                 {"pause_anomaly", {0.2, 0.75}},
                 {"burst_anomaly", {0.3}}});
  }
  if (name == "fig4") {
    return make({"breath", "pitch_anomaly", "pause_anomaly", "burst_anomaly", "label"},
                {{"pitch_anomaly", "label"}, {"pitch_anomaly", "pause_anomaly"}, {"pitch_anomaly", "breath"}},
                {{"pitch_anomaly", {0.5}},
                 {"label", {0.15, 0.85}},
                 {"pause_anomaly", {0.2, 0.75}},
                 {"breath", {0.75, 0.25}},
                 {"burst_anomaly", {0.3}}});
  }
  throw CausalError(ErrorCode::kUnknownFixture, "unknown SCM fixture '" + name + "'");
}

std::vector<std::string> scm_fixture_names() { return {"chain", "collider", "confounder", "fig3", "fig4"}; }

}  // namespace causal_cues
