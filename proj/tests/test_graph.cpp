#include <doctest.h>

#include <filesystem>
#include <map>
#include <random>

#include <nlohmann/json.hpp>

#include "causal_cues/graph.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace causal_cues;
using testing::error_of;

namespace {

MixedGraph abc() { return MixedGraph({"A", "B", "C"}); }

std::vector<std::vector<std::size_t>> subsets_without(std::size_t p, std::size_t x, std::size_t y) {
  std::vector<std::vector<std::size_t>> out;
  for (std::uint32_t m = 0; m < (1u << p); ++m) {
    if (m & ((1u << x) | (1u << y))) continue;
    std::vector<std::size_t> z;
    for (std::size_t v = 0; v < p; ++v) {
      if (m & (1u << v)) z.push_back(v);
    }
    out.push_back(z);
  }
  return out;
}

}  // namespace

TEST_CASE("complete_undirected edge counts") {
  CHECK(complete_undirected({"A"}).edge_count() == 0);
  const auto g3 = complete_undirected({"A", "B", "C"});
  CHECK(g3.edge_count() == 3);
  CHECK(g3.undirected_edges().size() == 3);
  CHECK(g3.directed_edges().empty());
  CHECK(complete_undirected({"breath", "pitch_anomaly", "audio_quality_anomaly", "pause_anomaly", "burst_anomaly",
                             "label"})
            .edge_count() == 15);
  CHECK(error_of([] { complete_undirected({"A", "A"}); }) == ErrorCode::kDuplicateNode);
}

TEST_CASE("edge bookkeeping keeps one edge per pair") {
  MixedGraph g = abc();
  g.add_directed(0, 1);
  CHECK(g.has_directed(0, 1));
  CHECK_FALSE(g.has_directed(1, 0));
  g.add_undirected(1, 0);
  CHECK(g.has_undirected(0, 1));
  CHECK_FALSE(g.has_directed(0, 1));
  g.add_directed(1, 0);
  CHECK(g.has_directed(1, 0));
  CHECK(g.edge_count() == 1);
  g.remove_edge(0, 1);
  CHECK(g.edge_count() == 0);
  CHECK(error_of([&] { g.add_directed(2, 2); }) == ErrorCode::kInvalidArgument);
  CHECK(error_of([&] { g.index_of("Z"); }) == ErrorCode::kUnknownNode);
}

TEST_CASE("d-separation on the canonical triples") {
  MixedGraph chain = abc();
  chain.add_directed(0, 1);
  chain.add_directed(1, 2);
  CHECK(d_separated(chain, "A", "C", {"B"}));
  CHECK_FALSE(d_separated(chain, "A", "C", {}));

  MixedGraph collider = abc();
  collider.add_directed(0, 1);
  collider.add_directed(2, 1);
  CHECK(d_separated(collider, "A", "C", {}));
  CHECK_FALSE(d_separated(collider, "A", "C", {"B"}));

  MixedGraph with_child({"A", "B", "C", "D"});
  with_child.add_directed(0, 1);
  with_child.add_directed(2, 1);
  with_child.add_directed(1, 3);
  CHECK_FALSE(d_separated(with_child, "A", "C", {"D"}));
}

TEST_CASE("d-separation errors") {
  MixedGraph g = abc();
  g.add_undirected(0, 1);
  CHECK(error_of([&] { d_separated(g, "A", "B", {}); }) == ErrorCode::kNotADag);
  MixedGraph cyc = abc();
  cyc.add_directed(0, 1);
  cyc.add_directed(1, 2);
  cyc.add_directed(2, 0);
  CHECK(error_of([&] { d_separated(cyc, "A", "B", {}); }) == ErrorCode::kNotADag);
  MixedGraph ok = abc();
  CHECK(error_of([&] { d_separated(ok, "A", "B", {"A"}); }) == ErrorCode::kOverlappingArguments);
}

TEST_CASE("d-separation matches path enumeration on every DAG with up to 4 nodes") {
  std::size_t checked = 0;
  for (std::size_t p = 2; p <= 4; ++p) {
    for (const auto& g : oracle::all_dags(p)) {
      for (std::size_t x = 0; x < p; ++x) {
        for (std::size_t y = x + 1; y < p; ++y) {
          for (const auto& z : subsets_without(p, x, y)) {
            const bool fast = d_separated(g, x, y, z);
            CHECK(fast == oracle::d_separated(g, x, y, z));
            CHECK(fast == d_separated(g, y, x, z));
            ++checked;
          }
        }
      }
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("property: d-separation matches path enumeration on random 6-node DAGs") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = oracle::random_dag(6, 0.4, rng);
    for (std::size_t x = 0; x < 6; ++x) {
      for (std::size_t y = x + 1; y < 6; ++y) {
        for (const auto& z : subsets_without(6, x, y)) CHECK(d_separated(g, x, y, z) == oracle::d_separated(g, x, y, z));
      }
    }
  }
}

TEST_CASE("v-structure orientation") {
  MixedGraph skel = abc();
  skel.add_undirected(0, 2);
  skel.add_undirected(1, 2);
  SepsetMap empty_sep;
  empty_sep.set(0, 1, {});
  const auto v = orient_v_structures(skel, empty_sep);
  CHECK(v.has_directed(0, 2));
  CHECK(v.has_directed(1, 2));

  SepsetMap with_c;
  with_c.set(0, 1, {2});
  const auto none = orient_v_structures(skel, with_c);
  CHECK(none == skel);

  CHECK(error_of([&] { orient_v_structures(skel, SepsetMap{}); }) == ErrorCode::kMissingSepset);
  MixedGraph directed = skel;
  directed.add_directed(0, 2);
  CHECK(error_of([&] { orient_v_structures(directed, empty_sep); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("conflicting v-structures leave the edge undirected and are reported") {
  // A - B - C - D with A,C and B,D separated by the empty set: triple (A,B,C)
  // wants C -> B, triple (B,C,D) wants B -> C.
  MixedGraph skel({"A", "B", "C", "D"});
  skel.add_undirected(0, 1);
  skel.add_undirected(1, 2);
  skel.add_undirected(2, 3);
  SepsetMap s;
  s.set(0, 2, {});
  s.set(1, 3, {});
  s.set(0, 3, {});
  std::vector<OrientationConflict> conflicts;
  const auto g = orient_v_structures(skel, s, &conflicts);
  CHECK(g.has_undirected(1, 2));
  CHECK(g.has_directed(0, 1));
  CHECK(g.has_directed(3, 2));
  REQUIRE(conflicts.size() == 1);
  CHECK(((conflicts[0].a == 1 && conflicts[0].b == 2) || (conflicts[0].a == 2 && conflicts[0].b == 1)));
}

TEST_CASE("Meek rules") {
  SUBCASE("R1") {
    MixedGraph g = abc();
    g.add_directed(0, 1);
    g.add_undirected(1, 2);
    const auto m = apply_meek_rules(g);
    CHECK(m.has_directed(1, 2));
  }
  SUBCASE("R2") {
    MixedGraph g = abc();
    g.add_directed(0, 1);
    g.add_directed(1, 2);
    g.add_undirected(0, 2);
    CHECK(apply_meek_rules(g).has_directed(0, 2));
  }
  SUBCASE("R3") {
    MixedGraph g({"a", "b", "c", "d"});
    g.add_undirected(0, 1);
    g.add_undirected(0, 2);
    g.add_undirected(0, 3);
    g.add_directed(2, 1);
    g.add_directed(3, 1);
    const auto m = apply_meek_rules(g);
    CHECK(m.has_directed(0, 1));
    CHECK(m.has_undirected(0, 2));
    CHECK(m.has_undirected(0, 3));
  }
  SUBCASE("R4") {
    MixedGraph g({"a", "b", "c", "d"});
    g.add_undirected(0, 1);
    g.add_undirected(0, 2);
    g.add_undirected(0, 3);
    g.add_directed(3, 2);
    g.add_directed(2, 1);
    const auto m = apply_meek_rules(g);
    CHECK(m.has_directed(0, 1));
    CHECK(m.has_undirected(0, 2));
    CHECK(m.has_undirected(0, 3));
  }
}

TEST_CASE("property: Meek closure is idempotent, acyclic and skeleton preserving") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dag = oracle::random_dag(6, 0.45, rng);
    // Keep v-structures directed, make everything else undirected.
    MixedGraph pattern = dag.skeleton();
    for (const auto& t : v_structures(dag)) {
      pattern.add_directed(t[0], t[1]);
      pattern.add_directed(t[2], t[1]);
    }
    const auto once = apply_meek_rules(pattern);
    CHECK(apply_meek_rules(once) == once);
    CHECK(once.is_acyclic());
    CHECK(once.skeleton() == dag.skeleton());
    CHECK(v_structures(once) == v_structures(dag));
    CHECK(once == cpdag_of(dag));
  }
}

TEST_CASE("cpdag_of examples") {
  MixedGraph chain = abc();
  chain.add_directed(0, 1);
  chain.add_directed(1, 2);
  const auto c = cpdag_of(chain);
  CHECK(c.has_undirected(0, 1));
  CHECK(c.has_undirected(1, 2));
  CHECK(c.directed_edges().empty());

  MixedGraph collider = abc();
  collider.add_directed(0, 1);
  collider.add_directed(2, 1);
  CHECK(cpdag_of(collider) == collider);

  MixedGraph und = abc();
  und.add_undirected(0, 1);
  CHECK(error_of([&] { cpdag_of(und); }) == ErrorCode::kNotADag);
}

TEST_CASE("property: Markov equivalent DAGs share one CPDAG") {
  for (std::size_t p : {3u, 4u}) {
    std::map<std::pair<std::vector<Edge>, std::vector<std::array<std::size_t, 3>>>, MixedGraph> classes;
    for (const auto& dag : oracle::all_dags(p)) {
      const auto key = std::make_pair(dag.skeleton().undirected_edges(), v_structures(dag));
      const auto cp = cpdag_of(dag);
      CHECK(cp.skeleton() == dag.skeleton());
      auto [it, inserted] = classes.emplace(key, cp);
      if (!inserted) CHECK(it->second == cp);
    }
    if (p == 3) CHECK(classes.size() == 11);
    if (p == 4) CHECK(classes.size() == 185);
  }
}

TEST_CASE("property: random DAGs with equal skeleton and v-structures map to one CPDAG") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 3 + rng() % 4;
    const auto dag = oracle::random_dag(p, 0.5, rng);
    const auto cp = cpdag_of(dag);
    for (const auto& ext : consistent_extensions(cp)) {
      CHECK(v_structures(ext) == v_structures(dag));
      CHECK(cpdag_of(ext) == cp);
    }
  }
}

TEST_CASE("descendants and ancestors") {
  MixedGraph g({"X", "Y", "W", "I"});
  g.add_directed(0, 1);
  g.add_directed(1, 2);
  CHECK(descendants(g, 0) == NodeSet{1, 2});
  CHECK(descendants(g, 3).empty());
  CHECK(ancestors(g, 2) == NodeSet{0, 1});

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dag = oracle::random_dag(6, 0.4, rng);
    for (std::size_t x = 0; x < 6; ++x) {
      for (auto y : descendants(dag, x)) {
        const auto back = descendants(dag, y);
        CHECK_FALSE(std::binary_search(back.begin(), back.end(), x));
      }
    }
  }
}

TEST_CASE("DAG extensions of a PDAG") {
  MixedGraph chain = abc();
  chain.add_undirected(0, 1);
  chain.add_undirected(1, 2);
  const auto exts = consistent_extensions(chain);
  CHECK(exts.size() == 3);  // the collider orientation is excluded
  const auto any = dag_extension(chain);
  REQUIRE(any);
  CHECK(any->is_dag());
  CHECK(acyclic_orientations(chain).size() == 4);

  MixedGraph tri = complete_undirected({"A", "B", "C"});
  CHECK(consistent_extensions(tri).size() == 6);
}

TEST_CASE("DOT export") {
  MixedGraph und = abc();
  und.add_undirected(0, 1);
  CHECK(to_dot(und) == "graph \"G\" {\n  \"A\";\n  \"B\";\n  \"C\";\n  \"A\" -- \"B\";\n}\n");
  MixedGraph mixed = abc();
  mixed.add_directed(2, 0);
  mixed.add_undirected(0, 1);
  const std::string dot = to_dot(mixed, "g");
  CHECK(dot.rfind("digraph \"g\" {", 0) == 0);
  CHECK(dot.find("\"C\" -> \"A\";") != std::string::npos);
  CHECK(dot.find("\"A\" -> \"B\" [dir=none];") != std::string::npos);
}

TEST_CASE("graph JSON round trip and validation") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = cpdag_of(oracle::random_dag(5, 0.5, rng));
    CHECK(graph_from_json(to_json(g)) == g);
  }
  MixedGraph g = abc();
  g.add_directed(0, 1);
  g.add_undirected(1, 2);
  const auto path = (std::filesystem::temp_directory_path() / "causal_cues_graph.json").string();
  save_graph(g, path);
  CHECK(load_graph(path) == g);
  std::filesystem::remove(path);

  using nlohmann::json;
  CHECK(error_of([] { graph_from_json(json::object()); }) == ErrorCode::kMalformedJson);
  CHECK(error_of([] { graph_from_json(json{{"nodes", {"a", "a"}}}); }) == ErrorCode::kDuplicateNode);
  CHECK(error_of([] { graph_from_json(json{{"nodes", json::array({"a"})}, {"directed", json::array({json::array({"a", "b"})})}}); }) ==
        ErrorCode::kUnknownNode);
  CHECK(error_of([] { graph_from_json(json{{"nodes", {"a", "b"}}, {"directed", {{"a", "b"}}}, {"undirected", {{"b", "a"}}}}); }) ==
        ErrorCode::kMalformedJson);
  CHECK(error_of([] { load_graph("/nonexistent.json"); }) == ErrorCode::kMissingFile);
}

TEST_CASE("induced subgraph") {
  MixedGraph g({"a", "b", "c"});
  g.add_directed(0, 1);
  g.add_undirected(1, 2);
  const auto s = induced_subgraph(g, {"b", "c"});
  CHECK(s.nodes() == std::vector<std::string>{"b", "c"});
  CHECK(s.has_undirected(0, 1));
  CHECK(s.edge_count() == 1);
}
