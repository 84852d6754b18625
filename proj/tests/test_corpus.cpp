#include <catch2/catch_amalgamated.hpp>

#include "jointchoice/corpus.hpp"
#include "jointchoice/io.hpp"
#include "jointchoice/moebius.hpp"

using namespace jointchoice;

TEST_CASE("fixtures reproduce their cited cells", "[corpus]") {
  SECTION("table1") {
    auto fx = fixture("table1");
    const auto& xs = fx.rule.x_set();
    const auto& ys = fx.rule.y_set();
    CHECK_FALSE(fx.rule.complete());
    CHECK(fx.rule.probability(xs.index_of("x1"), ys.index_of("y1"), xs.full(), ys.full()) ==
          Rational(1, 5));
    CHECK(fx.rule.probability(xs.index_of("x3"), ys.index_of("y2"), xs.full(),
                              ys.mask_of({"y1", "y2"})) == Rational(1, 10));
  }
  SECTION("table2") {
    auto fx = fixture("table2");
    const auto& xs = fx.rule.x_set();
    const auto& ys = fx.rule.y_set();
    CHECK(fx.rule.tables().size() == 4);
    CHECK(fx.rule.probability(xs.index_of("y"), ys.index_of("d"), xs.mask_of({"y", "z"}),
                              ys.mask_of({"c", "d"})) == Rational(1, 2));
    CHECK(fx.rule.probability(xs.index_of("w"), ys.index_of("a"), xs.mask_of({"w", "x"}),
                              ys.mask_of({"a", "b"})) == Rational(1, 2));
  }
  SECTION("example1") {
    auto fx = fixture("example1");
    const auto& xs = fx.rule.x_set();
    const auto& ys = fx.rule.y_set();
    REQUIRE(fx.rule.complete());
    CHECK(fx.rule.probability(xs.index_of("c"), ys.index_of("z"), xs.mask_of({"c", "d"}),
                              ys.mask_of({"y", "z"})) == Rational(1, 2));
    CHECK(fx.rule.probability(xs.index_of("d"), ys.index_of("y"), xs.mask_of({"c", "d"}),
                              ys.mask_of({"y", "z"})) == Rational(1, 2));
    // outside the overridden block the full-order mixture governs
    CHECK(fx.rule.probability(xs.index_of("c"), ys.index_of("w"), xs.mask_of({"c", "d"}), ys.full()) ==
          Rational(1, 2));
  }
  SECTION("remark_rule") {
    auto fx = fixture("remark_rule");
    const auto& xs = fx.rule.x_set();
    const auto& ys = fx.rule.y_set();
    CHECK(fx.rule.probability(xs.index_of("a"), ys.index_of("c"), xs.mask_of({"a"}),
                              ys.mask_of({"c", "d"})) == Rational(1));
    CHECK(fx.rule.probability(xs.index_of("b"), ys.index_of("d"), xs.full(), ys.full()) == Rational(1));
  }
  SECTION("unknown names are rejected") { CHECK_THROWS_AS(fixture("table9"), PreconditionError); }
}

TEST_CASE("fixture files on disk match the constructors", "[corpus]") {
  for (const char* name : {"table1", "table2", "example1", "remark_rule"}) {
    auto fx = fixture(name);
    std::string path = std::string(JOINTCHOICE_FIXTURE_DIR) + "/" + name + ".json";
    CHECK(load_dataset(path) == fx.rule);
  }
}

TEST_CASE("generators are deterministic", "[corpus]") {
  for (auto mode : {GeneratorMode::kProbabilityPairMeasure, GeneratorMode::kSignedPairMeasure,
                    GeneratorMode::kArbitraryRule, GeneratorMode::kMarginalityViolatingRule}) {
    GeneratorSpec spec;
    spec.seed = 42;
    spec.mode = mode;
    auto a = generate(spec);
    auto b = generate(spec);
    CHECK(serialize(a.rule) == serialize(b.rule));
    if (a.measure)
      CHECK(serialize(*a.measure, a.rule.x_set(), a.rule.y_set()) ==
            serialize(*b.measure, b.rule.x_set(), b.rule.y_set()));
  }
}

TEST_CASE("generator modes deliver their contracts", "[corpus]") {
  SECTION("probability mode passes marginality and non-negativity") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GeneratorSpec spec;
      spec.seed = seed;
      auto rule = generate(spec).rule;
      CHECK(check_marginality(rule).pass);
      CHECK(check_nonnegativity(bm_joint(rule)).pass);
    }
  }
  SECTION("violating mode provably violates marginality") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      GeneratorSpec spec;
      spec.seed = seed;
      spec.mode = GeneratorMode::kMarginalityViolatingRule;
      CHECK_FALSE(check_marginality(generate(spec).rule).pass);
    }
  }
  SECTION("size caps are enforced") {
    GeneratorSpec spec;
    spec.x_size = 9;
    CHECK_THROWS_AS(generate(spec), PreconditionError);
  }
}
