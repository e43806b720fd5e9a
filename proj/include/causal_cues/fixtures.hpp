#pragma once

#include <string>
#include <vector>

#include "causal_cues/graph.hpp"

namespace causal_cues {

/// Column names of the annotated audio dataset, in the published order.
inline const std::vector<std::string>& edlf_columns() {
  static const std::vector<std::string> cols{"breath",        "pitch_anomaly", "audio_quality_anomaly",
                                             "pause_anomaly", "burst_anomaly", "label"};
  return cols;
}

/// Published graphs over the EDLF columns:
///   fig3    ensemble graph with audio quality
///   fig4    ensemble graph without audio quality (5 nodes)
///   table2  a DAG extension of fig3 under which every listed adjustment set
///           of the with-audio-quality effect table is valid
///   table3  the matching DAG extension of fig4
///   expert  the sociolinguists' diagram read as edges
/// Throws UnknownFixture.
MixedGraph graph_fixture(const std::string& name);
std::vector<std::string> graph_fixture_names();

}  // namespace causal_cues
