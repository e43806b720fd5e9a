#include "causal_cues/fixtures.hpp"

#include "causal_cues/error.hpp"

namespace causal_cues {

namespace {

struct Spec {
  bool with_aq;
  std::vector<std::pair<std::string, std::string>> directed;
  std::vector<std::pair<std::string, std::string>> undirected;
};

MixedGraph build(const Spec& s) {
  std::vector<std::string> nodes;
  for (const auto& n : edlf_columns()) {
    if (s.with_aq || n != "audio_quality_anomaly") nodes.push_back(n);
  }
  MixedGraph g(nodes);
  for (const auto& [a, b] : s.directed) g.add_directed(g.index_of(a), g.index_of(b));
  for (const auto& [a, b] : s.undirected) g.add_undirected(g.index_of(a), g.index_of(b));
  return g;
}

}  // namespace

MixedGraph graph_fixture(const std::string& name) {
  const std::string aq = "audio_quality_anomaly", pitch = "pitch_anomaly", pause = "pause_anomaly",
                    burst = "burst_anomaly", breath = "breath", label = "label";
  if (name == "fig3") {
    return build({true, {{aq, label}}, {{aq, breath}, {aq, pitch}, {pitch, pause}}});
  }
  if (name == "fig4") {
    return build({false, {{pitch, label}}, {{pitch, pause}, {pitch, breath}}});
  }
  if (name == "table2") {
    return build({true, {{pause, pitch}, {pitch, aq}, {breath, aq}, {aq, label}}, {}});
  }
  if (name == "table3") {
    return build({false, {{pause, pitch}, {breath, pitch}, {pitch, label}}, {}});
  }
  if (name == "expert") {
    return build({true,
                  {{aq, pitch}, {aq, breath}, {aq, burst}, {aq, pause}, {aq, label},
                   {pitch, label}, {breath, label}, {burst, label}, {pause, label}},
                  {}});
  }
  throw CausalError(ErrorCode::kUnknownFixture, "unknown graph fixture '" + name + "'");
}

std::vector<std::string> graph_fixture_names() { return {"fig3", "fig4", "table2", "table3", "expert"}; }

}  // namespace causal_cues
