#include <catch2/catch_amalgamated.hpp>

#include "jointchoice/corpus.hpp"
#include "jointchoice/io.hpp"
#include "helpers.hpp"

using namespace jointchoice;
using jointchoice::testing::order_of;
using jointchoice::testing::pair_measure;

namespace {

const char* kTable1Json = R"({
  "X": ["x1", "x2", "x3"],
  "Y": ["y1", "y2", "y3"],
  "complete": false,
  "tables": [
    {"A": ["x1","x2","x3"], "B": ["y1","y2","y3"],
     "p": [{"x":"x1","y":"y1","pr":"0.2"}, {"x":"x1","y":"y3","pr":"0.3"},
           {"x":"x2","y":"y1","pr":"0.1"}, {"x":"x2","y":"y2","pr":"0.3"},
           {"x":"x3","y":"y3","pr":"0.1"}]},
    {"A": ["x1","x2","x3"], "B": ["y1","y2"],
     "p": [{"x":"x1","y":"y1","pr":"0.3"}, {"x":"x1","y":"y2","pr":"0.2"},
           {"x":"x2","y":"y1","pr":"0.1"}, {"x":"x2","y":"y2","pr":"0.3"},
           {"x":"x3","y":"y2","pr":"0.1"}]}
  ]
})";

}  // namespace

TEST_CASE("datasets parse with exact decimals", "[io]") {
  JointChoiceRule rule = parse_dataset(kTable1Json);
  CHECK_FALSE(rule.complete());
  CHECK(rule.tables().size() == 2);
  const auto& xs = rule.x_set();
  const auto& ys = rule.y_set();
  CHECK(rule.probability(xs.index_of("x1"), ys.index_of("y1"), xs.full(), ys.full()) == Rational(1, 5));
  CHECK(rule == fixture("table1").rule);
}

TEST_CASE("a degenerate singleton dataset is valid", "[io]") {
  JointChoiceRule rule = parse_dataset(R"({
    "X": ["x"], "Y": ["y"], "complete": true,
    "tables": [{"A": ["x"], "B": ["y"], "p": [{"x":"x","y":"y","pr":"1"}]}]
  })");
  CHECK(rule.complete());
  CHECK(rule.probability(0, 0, 1u, 1u) == 1);
}

TEST_CASE("parse errors carry the offending table", "[io]") {
  std::string broken = kTable1Json;
  auto pos = broken.find("\"0.2\"");
  broken.replace(pos, 5, "\"0.3\"");
  CHECK_THROWS_WITH(parse_dataset(broken), Catch::Matchers::ContainsSubstring("does not sum to 1"));

  CHECK_THROWS_AS(parse_dataset("not json"), FormatError);
  CHECK_THROWS_AS(parse_dataset(R"({"X": ["a"], "Y": ["b"], "tables": []})"), FormatError);

  CHECK_THROWS_WITH(parse_dataset(R"({
    "X": ["a","b"], "Y": ["c"], "complete": false,
    "tables": [{"A": ["a"], "B": ["c"], "p": [{"x":"b","y":"c","pr":"1"}]}]
  })"),
                    Catch::Matchers::ContainsSubstring("outside"));

  CHECK_THROWS_WITH(parse_dataset(R"({
    "X": ["a"], "Y": ["c"], "complete": false,
    "tables": [{"A": ["a"], "B": ["c"], "p": [{"x":"a","y":"c","pr":"1"}]},
               {"A": ["a"], "B": ["c"], "p": [{"x":"a","y":"c","pr":"1"}]}]
  })"),
                    Catch::Matchers::ContainsSubstring("duplicate table"));
}

TEST_CASE("rule serialization round-trips bit-exactly", "[io]") {
  for (const char* name : {"table1", "table2", "example1", "remark_rule"}) {
    JointChoiceRule rule = fixture(name).rule;
    CHECK(parse_dataset(serialize(rule)) == rule);
  }
}

TEST_CASE("generated rules and measures round-trip", "[io]") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    GeneratorSpec spec;
    spec.seed = seed;
    spec.mode = seed % 2 ? GeneratorMode::kProbabilityPairMeasure : GeneratorMode::kSignedPairMeasure;
    auto instance = generate(spec);
    CHECK(parse_dataset(serialize(instance.rule)) == instance.rule);
    auto text = serialize(*instance.measure, instance.rule.x_set(), instance.rule.y_set());
    CHECK(parse_pair_measure(text, instance.rule.x_set(), instance.rule.y_set()) == *instance.measure);
  }
}

TEST_CASE("measure serialization", "[io]") {
  AlternativeSet xs({"a", "b"});
  AlternativeSet ys({"x", "y"});

  SECTION("a delta measure serializes with weight \"1\"") {
    auto delta = pair_measure({{"a>b", "x>y", Rational(1)}}, xs, ys);
    Json doc = measure_to_json(delta, xs, ys);
    REQUIRE(doc.at("entries").size() == 1);
    CHECK(doc.at("entries")[0].at("w") == "1");
    CHECK(doc.at("type") == "order_pairs");
  }
  SECTION("order measures round-trip") {
    auto m = jointchoice::testing::order_measure({{"a>b", Rational(3, 2)}, {"b>a", Rational(-1, 2)}}, xs);
    CHECK(parse_order_measure(serialize(m, xs), xs) == m);
  }
  SECTION("choice-pair measures round-trip") {
    ChoiceFunction c1, c2;
    c1.picks[xs.full()] = 0;
    c1.picks[xs.mask_of({"b"})] = 1;
    c2.picks[ys.full()] = 1;
    SignedChoicePairMeasure m({{{c1, c2}, Rational(1)}});
    CHECK(parse_choice_pair_measure(serialize(m, xs, ys), xs, ys) == m);
  }
  SECTION("weights always serialize in lowest terms") {
    auto m = pair_measure({{"a>b", "x>y", Rational(2, 4)}, {"b>a", "y>x", Rational(2, 4)}}, xs, ys);
    Json doc = measure_to_json(m, xs, ys);
    CHECK(doc.at("entries")[0].at("w") == "1/2");
  }
}

TEST_CASE("the counterexample fixture survives serialization", "[io]") {
  // built from its two-mixture description, then round-tripped cell by cell
  JointChoiceRule rule = fixture("example1").rule;
  JointChoiceRule reparsed = parse_dataset(serialize(rule));
  for (const auto& [bp, table] : rule.tables())
    for (const auto& [cell, v] : table)
      CHECK(reparsed.probability(cell.first, cell.second, bp.first, bp.second) == v);
}
