#include "causal_cues/ensemble.hpp"

#include "causal_cues/error.hpp"

namespace causal_cues {

MixedGraph ensemble(const MixedGraph& g_pc, const MixedGraph& g_ges, const AgreementPolicy& policy) {
  if (g_pc.nodes() != g_ges.nodes()) {
    throw CausalError(ErrorCode::kNodeSetMismatch, "ensemble inputs must share the same ordered node list");
  }
  const std::size_t n = g_pc.size();
  MixedGraph out(g_pc.nodes());
  std::vector<Edge> directed;

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!g_pc.adjacent(a, b) || !g_ges.adjacent(a, b)) continue;
      const bool pc_ab = g_pc.has_directed(a, b), pc_ba = g_pc.has_directed(b, a);
      const bool ges_ab = g_ges.has_directed(a, b), ges_ba = g_ges.has_directed(b, a);
      const bool pc_und = g_pc.has_undirected(a, b), ges_und = g_ges.has_undirected(a, b);

      enum { kDrop, kUndirected, kAB, kBA } verdict = kDrop;
      if (policy.mode == AgreementMode::kStrict) {
        if (pc_ab && ges_ab) {
          verdict = kAB;
        } else if (pc_ba && ges_ba) {
          verdict = kBA;
        } else if (pc_und && ges_und) {
          verdict = kUndirected;
        } else {
          verdict = policy.conflict_action == ConflictAction::kDropEdge ? kDrop : kUndirected;
        }
      } else {
        if ((pc_ab && ges_ba) || (pc_ba && ges_ab)) {
          verdict = policy.conflict_action == ConflictAction::kDropEdge ? kDrop : kUndirected;
        } else if (pc_ab || ges_ab) {
          verdict = kAB;
        } else if (pc_ba || ges_ba) {
          verdict = kBA;
        } else {
          verdict = kUndirected;
        }
      }
      switch (verdict) {
        case kDrop: break;
        case kUndirected: out.add_undirected(a, b); break;
        case kAB: directed.emplace_back(a, b); break;
        case kBA: directed.emplace_back(b, a); break;
      }
    }
  }
  // Directions come from two different acyclic graphs, so their union can
  // cycle; later edges that would close one stay undirected.
  for (auto [from, to] : directed) {
    if (out.has_directed_path(to, from)) {
      out.add_undirected(from, to);
    } else {
      out.add_directed(from, to);
    }
  }
  return out;
}

AgreementMode parse_agreement_mode(const std::string& s) {
  if (s == "strict") return AgreementMode::kStrict;
  if (s == "skeleton_first") return AgreementMode::kSkeletonFirst;
  throw CausalError(ErrorCode::kInvalidArgument, "unknown agreement mode '" + s + "'");
}

ConflictAction parse_conflict_action(const std::string& s) {
  if (s == "drop" || s == "drop_edge") return ConflictAction::kDropEdge;
  if (s == "undirect" || s == "keep_undirected") return ConflictAction::kKeepUndirected;
  throw CausalError(ErrorCode::kInvalidArgument, "unknown conflict action '" + s + "'");
}

}  // namespace causal_cues
