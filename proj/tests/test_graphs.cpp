#include <catch2/catch_amalgamated.hpp>

#include "jointchoice/corpus.hpp"
#include "jointchoice/graphs.hpp"
#include "helpers.hpp"

using namespace jointchoice;
using jointchoice::testing::order_of;
using jointchoice::testing::order_measure;
using jointchoice::testing::pair_measure;

TEST_CASE("the path-order bijection", "[graphs]") {
  AlternativeSet abc({"a", "b", "c"});
  auto path = order_to_path(order_of("a>b>c", abc));
  CHECK(path.sets == std::vector<Mask>{0b111u, 0b110u, 0b100u, 0u});

  AlternativeSet abcd({"a", "b", "c", "d"});
  LatticePath first_generator;
  first_generator.sets = {abcd.full(), abcd.mask_of({"b", "c", "d"}), abcd.mask_of({"c", "d"}),
                          abcd.mask_of({"d"}), 0u};
  CHECK(path_to_order(first_generator) == order_of("a>b>c>d", abcd));

  for (const auto& order : all_orders(4)) CHECK(path_to_order(order_to_path(order)) == order);

  LatticePath broken;
  broken.sets = {0b11u, 0u};
  CHECK_THROWS_AS(path_to_order(broken), FormatError);
}

TEST_CASE("system construction for the counterexample", "[graphs]") {
  auto fx = fixture("example1");
  const auto& xs = fx.rule.x_set();
  const auto& ys = fx.rule.y_set();
  MarginalGraphSystem system = build_system(bm_table(fx.rule), 1);

  Mask cd = xs.mask_of({"c", "d"});
  CHECK(system.marginal.at(cd, xs.index_of("c")) == Rational(1, 2));

  const LatticeFlowGraph& conditional = system.conditionals.at({cd, xs.index_of("c")});
  CHECK(conditional.at(ys.mask_of({"y", "z"}), ys.index_of("z")) == Rational(1, 2));

  SECTION("lead 2 swaps the roles") {
    MarginalGraphSystem swapped = build_system(bm_table(fx.rule), 2);
    CHECK(swapped.marginal.ground == ys);
    Mask yz = ys.mask_of({"y", "z"});
    CHECK(swapped.marginal.at(yz, ys.index_of("y")) == Rational(1, 2));
    // conditional at (y,{y,z}) carries q(.,y|.,{y,z}) over the X lattice
    CHECK(swapped.conditionals.at({yz, ys.index_of("y")}).at(cd, xs.index_of("d")) == Rational(1, 2));
  }
  SECTION("marginality failures are rejected") {
    GeneratorSpec spec;
    spec.seed = 5;
    spec.mode = GeneratorMode::kMarginalityViolatingRule;
    auto rule = generate(spec).rule;
    CHECK_THROWS_AS(build_system(bm_joint(rule), 1), PreconditionError);
  }
}

TEST_CASE("a delta rule's system carries one unit path", "[graphs]") {
  AlternativeSet xs({"a", "b", "c"});
  AlternativeSet ys({"u", "v"});
  auto delta = pair_measure({{"c>a>b", "v>u", Rational(1)}}, xs, ys);
  auto rule = induce_from_order_pairs(delta, xs, ys);
  MarginalGraphSystem system = build_system(bm_table(rule), 1);

  auto paths = supported_paths(system.marginal);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == order_of("c>a>b", xs));

  LatticePath lead_path = order_to_path(paths[0]);
  for (int k = 0; k < 3; ++k) {
    Mask a = lead_path.sets[k];
    int x = paths[0].ranking()[k];
    CHECK(system.marginal.at(a, x) == 1);
    auto follower = supported_paths(system.conditionals.at({a, x}));
    REQUIRE(follower.size() == 1);
    CHECK(follower[0] == order_of("v>u", ys));
  }
  // conditionals off the lead path carry no flow at all
  for (const auto& [key, graph] : system.conditionals) {
    bool on_path = false;
    for (int k = 0; k < 3; ++k)
      if (key == std::make_pair(lead_path.sets[k], paths[0].ranking()[k])) on_path = true;
    if (!on_path) CHECK(graph.all_zero());
  }
}

TEST_CASE("flow conservation", "[graphs]") {
  auto fx = fixture("example1");
  MarginalGraphSystem system = build_system(bm_table(fx.rule), 1);
  CHECK(flow_conservation(system.marginal).pass);
  for (const auto& [key, graph] : system.conditionals) CHECK(flow_conservation(graph).pass);

  LatticeFlowGraph lone(AlternativeSet({"a", "b", "c"}));
  lone.at(0b011u, 0) = 1;  // single unit edge {a,b} -> {b}
  auto report = flow_conservation(lone);
  REQUIRE_FALSE(report.pass);
  CHECK(report.witnesses.size() == 2);  // both endpoints are unbalanced
}

TEST_CASE("supported paths", "[graphs]") {
  SECTION("the counterexample marginal has exactly four") {
    auto q1 = bm_marginal(fixture("example1").rule, 1);
    LatticeFlowGraph graph(q1);
    auto paths = supported_paths(graph);
    AlternativeSet xs({"a", "b", "c", "d"});
    REQUIRE(paths.size() == 4);
    CHECK(std::count(paths.begin(), paths.end(), order_of("a>b>c>d", xs)) == 1);
    CHECK(std::count(paths.begin(), paths.end(), order_of("a>b>d>c", xs)) == 1);
    CHECK(std::count(paths.begin(), paths.end(), order_of("b>a>c>d", xs)) == 1);
    CHECK(std::count(paths.begin(), paths.end(), order_of("b>a>d>c", xs)) == 1);
    // every returned path has strictly positive minimum edge capacity
    for (const auto& order : paths) {
      Mask current = graph.ground.full();
      for (int x : order.ranking()) {
        CHECK(graph.at(current, x) > 0);
        current = without(current, x);
      }
    }
  }
  SECTION("a half/half mixture of opposite orders gives two edge-disjoint paths") {
    AlternativeSet xs({"a", "b", "c"});
    auto rcr = induce_from_orders(order_measure({{"a>b>c", Rational(1, 2)}, {"c>b>a", Rational(1, 2)}}, xs),
                                  xs);
    auto paths = supported_paths(LatticeFlowGraph(bm_single(rcr)));
    REQUIRE(paths.size() == 2);
    CHECK(paths[0] == order_of("a>b>c", xs));
    CHECK(paths[1] == order_of("c>b>a", xs));
    auto p0 = order_to_path(paths[0]);
    auto p1 = order_to_path(paths[1]);
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) CHECK(p0.sets[i] != p1.sets[j]);
  }
  SECTION("negative capacities are rejected") {
    LatticeFlowGraph g(AlternativeSet({"a", "b"}));
    g.at(0b11u, 0) = Rational(-1);
    CHECK_THROWS_AS(supported_paths(g), PreconditionError);
  }
  SECTION("the count cap triggers before materialization") {
    LatticeFlowGraph g(AlternativeSet({"a", "b", "c", "d"}));
    for (Mask a : nonempty_subsets(g.ground.full()))
      for (int x : elements_of(a)) g.at(a, x) = 1;
    CHECK(count_supported_paths(g) == 24);
    CHECK_THROWS_WITH(supported_paths(g, 10), Catch::Matchers::ContainsSubstring("24"));
  }
}

TEST_CASE("branching relations evaluate the definitions literally", "[graphs]") {
  AlternativeSet xs({"a", "b", "c", "d"});
  auto path = [&](const std::string& text) { return order_to_path(order_of(text, xs)); };

  SECTION("identical paths are unrelated") {
    auto rel = branching_relation(path("a>b>c>d"), path("a>b>c>d"));
    CHECK_FALSE(rel.branching);
    CHECK_FALSE(rel.in_branching);
    CHECK_FALSE(rel.out_branching);
  }
  SECTION("merging at {c,d} and staying together in-branches only") {
    auto rel = branching_relation(path("a>b>c>d"), path("b>a>c>d"));
    CHECK(rel.in_branching);
    CHECK_FALSE(rel.out_branching);
    CHECK_FALSE(rel.branching);
  }
  SECTION("merging at {c,d} then splitting does all three") {
    auto rel = branching_relation(path("a>b>c>d"), path("b>a>d>c"));
    CHECK(rel.in_branching);
    CHECK(rel.out_branching);
    CHECK(rel.branching);
  }
  SECTION("paths sharing only the ground set and the empty set are unrelated") {
    AlternativeSet abc({"a", "b", "c"});
    auto p1 = order_to_path(order_of("a>b>c", abc));
    auto p2 = order_to_path(order_of("c>b>a", abc));
    auto rel = branching_relation(p1, p2);
    CHECK_FALSE(rel.branching);
    CHECK_FALSE(rel.in_branching);
    CHECK_FALSE(rel.out_branching);
  }
}

TEST_CASE("unique representation check", "[graphs]") {
  SECTION("the counterexample marginal fails") {
    auto q1 = bm_marginal(fixture("example1").rule, 1);
    auto result = unique_rum_check(q1);
    CHECK_FALSE(result.unique);
    CHECK(result.path_without_edge.has_value());
  }
  SECTION("edge-disjoint supported paths pass") {
    AlternativeSet xs({"a", "b", "c"});
    auto rcr = induce_from_orders(order_measure({{"a>b>c", Rational(1, 2)}, {"c>b>a", Rational(1, 2)}}, xs),
                                  xs);
    auto result = unique_rum_check(bm_single(rcr));
    REQUIRE(result.unique);
    REQUIRE(result.certificates.size() == 2);
    // with edge-disjoint paths the first edge already qualifies
    CHECK(result.certificates[0].edge_position == 0);
    CHECK(result.certificates[1].edge_position == 0);
  }
  SECTION("a delta marginal passes") {
    AlternativeSet xs({"a", "b", "c", "d"});
    auto rcr = induce_from_orders(order_measure({{"d>c>b>a", Rational(1)}}, xs), xs);
    auto result = unique_rum_check(bm_single(rcr));
    REQUIRE(result.unique);
    CHECK(result.certificates.size() == 1);
  }
  SECTION("negative polynomials are rejected") {
    LatticeFlowGraph g(AlternativeSet({"a", "b"}));
    g.at(0b11u, 0) = Rational(-1, 2);
    CHECK_THROWS_AS(unique_rum_check(g), PreconditionError);
  }
}

TEST_CASE("graph exports", "[graphs]") {
  auto q1 = bm_marginal(fixture("example1").rule, 1);
  LatticeFlowGraph graph(q1);
  auto doc = graph_to_json(graph);
  CHECK(doc.at("edges").size() == 8);  // the four supported paths overlap on eight edges
  for (const auto& edge : doc.at("edges")) CHECK(edge.at("cap") == "1/2");

  std::string dot = graph_to_dot(graph, "marginal");
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find("{c,d}") != std::string::npos);
  CHECK(dot.find("1/2") != std::string::npos);
}
