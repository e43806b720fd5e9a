#pragma once

#include <string>
#include <vector>

#include "causal_cues/graph.hpp"

namespace causal_cues {

enum class AgreementMode { kStrict, kSkeletonFirst };
enum class ConflictAction { kDropEdge, kKeepUndirected };

struct AgreementPolicy {
  AgreementMode mode = AgreementMode::kSkeletonFirst;
  ConflictAction conflict_action = ConflictAction::kKeepUndirected;
};

/// Edge-intersection of two graphs over the same node list.
///
/// The skeleton is always the intersection of the two skeletons. strict keeps
/// a direction only when both graphs carry it (and keeps an undirected edge
/// only when both are undirected); skeleton_first takes a direction offered by
/// either graph unless the other graph opposes it. Disagreements fall to the
/// conflict action. A direction that would close a directed cycle is
/// downgraded to undirected.
MixedGraph ensemble(const MixedGraph& g_pc, const MixedGraph& g_ges, const AgreementPolicy& policy = {});

AgreementMode parse_agreement_mode(const std::string& s);
ConflictAction parse_conflict_action(const std::string& s);

}  // namespace causal_cues
