#include "causal_cues/compare.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

std::vector<std::string> union_nodes(const MixedGraph& a, const MixedGraph& b) {
  std::vector<std::string> nodes = b.nodes();
  for (const auto& n : a.nodes()) {
    if (std::find(nodes.begin(), nodes.end(), n) == nodes.end()) nodes.push_back(n);
  }
  return nodes;
}

// Same edges on the given node list.
MixedGraph widen(const MixedGraph& g, const std::vector<std::string>& nodes) {
  MixedGraph out(nodes);
  for (auto [a, b] : g.directed_edges()) out.add_directed(out.index_of(g.node(a)), out.index_of(g.node(b)));
  for (auto [a, b] : g.undirected_edges()) out.add_undirected(out.index_of(g.node(a)), out.index_of(g.node(b)));
  return out;
}

std::string describe(const MixedGraph& g, std::size_t a, std::size_t b) {
  if (g.has_directed(a, b)) return g.node(a) + " -> " + g.node(b);
  if (g.has_directed(b, a)) return g.node(b) + " -> " + g.node(a);
  return g.node(a) + " -- " + g.node(b);
}

bool same_mark(const MixedGraph& f, const MixedGraph& e, std::size_t a, std::size_t b) {
  return f.has_directed(a, b) == e.has_directed(a, b) && f.has_directed(b, a) == e.has_directed(b, a) &&
         f.has_undirected(a, b) == e.has_undirected(a, b);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

GraphComparison compare_graphs(const MixedGraph& found, const MixedGraph& expected) {
  GraphComparison c;
  c.nodes = union_nodes(found, expected);
  const MixedGraph f = widen(found, c.nodes), e = widen(expected, c.nodes);
  std::size_t shared_same = 0;
  for (std::size_t a = 0; a < c.nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < c.nodes.size(); ++b) {
      const bool in_f = f.adjacent(a, b), in_e = e.adjacent(a, b);
      if (in_f && in_e) {
        ++c.true_positive;
        if (same_mark(f, e, a, b)) {
          ++shared_same;
        } else {
          ++c.shd;
          c.reoriented.push_back(describe(f, a, b) + " (expected " + describe(e, a, b) + ")");
        }
      } else if (in_f) {
        ++c.false_positive;
        ++c.shd;
        c.extra.push_back(describe(f, a, b));
      } else if (in_e) {
        ++c.false_negative;
        ++c.shd;
        c.missing.push_back(describe(e, a, b));
      }
    }
  }
  if (c.true_positive + c.false_positive) {
    c.precision = static_cast<double>(c.true_positive) / static_cast<double>(c.true_positive + c.false_positive);
  }
  if (c.true_positive + c.false_negative) {
    c.recall = static_cast<double>(c.true_positive) / static_cast<double>(c.true_positive + c.false_negative);
  }
  if (c.true_positive) c.direction_agreement = static_cast<double>(shared_same) / static_cast<double>(c.true_positive);
  return c;
}

std::size_t skeleton_shd(const MixedGraph& a, const MixedGraph& b) {
  const auto c = compare_graphs(a.skeleton(), b.skeleton());
  return c.false_positive + c.false_negative;
}

std::string format_comparison(const GraphComparison& c) {
  std::ostringstream out;
  out << "skeleton precision   " << fmt(c.precision) << '\n'
      << "skeleton recall      " << fmt(c.recall) << '\n'
      << "direction agreement  " << fmt(c.direction_agreement) << '\n'
      << "SHD                  " << c.shd << '\n';
  for (const auto& s : c.missing) out << "missing     " << s << '\n';
  for (const auto& s : c.extra) out << "extra       " << s << '\n';
  for (const auto& s : c.reoriented) out << "reoriented  " << s << '\n';
  return out.str();
}

nlohmann::json to_json(const GraphComparison& c) {
  return {{"nodes", c.nodes},
          {"true_positive", c.true_positive},
          {"false_positive", c.false_positive},
          {"false_negative", c.false_negative},
          {"precision", c.precision},
          {"recall", c.recall},
          {"direction_agreement", c.direction_agreement},
          {"shd", c.shd},
          {"missing", c.missing},
          {"extra", c.extra},
          {"reoriented", c.reoriented}};
}

}  // namespace causal_cues
