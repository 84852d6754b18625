#include <catch2/catch_amalgamated.hpp>

#include "jointchoice/core.hpp"
#include "jointchoice/corpus.hpp"
#include "helpers.hpp"

using namespace jointchoice;
using jointchoice::testing::order_of;
using jointchoice::testing::pair_measure;

TEST_CASE("rationals parse exactly", "[core]") {
  CHECK(parse_rational("0.2") == Rational(1, 5));
  CHECK(parse_rational("1/2") == Rational(1, 2));
  CHECK(parse_rational("3") == Rational(3));
  CHECK(parse_rational("-0.25") == Rational(-1, 4));
  CHECK(parse_rational("2/4") == Rational(1, 2));
  CHECK(parse_rational("1/-2") == Rational(-1, 2));
  CHECK(format_rational(Rational(2, 4)) == "1/2");
  CHECK(format_rational(Rational(1)) == "1");
  CHECK(format_rational(Rational(-3, 6)) == "-1/2");
  CHECK_THROWS_AS(parse_rational("1/0"), FormatError);
  CHECK_THROWS_AS(parse_rational("abc"), FormatError);
  CHECK_THROWS_AS(parse_rational(""), FormatError);
}

TEST_CASE("alternative sets validate labels", "[core]") {
  CHECK_THROWS_AS(AlternativeSet(std::vector<std::string>{}), FormatError);
  CHECK_THROWS_AS(AlternativeSet({"a", "a"}), FormatError);
  CHECK_THROWS_AS(AlternativeSet({"a", ""}), FormatError);
  AlternativeSet s({"a", "b", "c"});
  CHECK(s.index_of("b") == 1);
  CHECK(s.mask_of({"a", "c"}) == 0b101u);
  CHECK(s.describe(0b101u) == "{a,c}");
}

TEST_CASE("maximal picks the highest-ranked member of the menu", "[core]") {
  AlternativeSet abcd({"a", "b", "c", "d"});
  auto order = order_of("a>b>c>d", abcd);
  CHECK(maximal(order, abcd.mask_of({"b", "c", "d"})) == abcd.index_of("b"));

  AlternativeSet wxyz({"w", "x", "y", "z"});
  CHECK(maximal(order_of("w>x>y>z", wxyz), wxyz.full()) == wxyz.index_of("w"));

  // second generating order of the counterexample mixture
  CHECK(maximal(order_of("b>a>d>c", abcd), abcd.mask_of({"c", "d"})) == abcd.index_of("d"));

  CHECK_THROWS_AS(maximal(order, 0), PreconditionError);
}

TEST_CASE("maximal is invariant under restricting the order to the menu", "[core]") {
  AlternativeSet ground({"a", "b", "c", "d"});
  for (const auto& order : all_orders(4)) {
    for (Mask menu : nonempty_subsets(ground.full())) {
      // restriction: re-rank only the menu members, preserving relative order
      std::vector<int> restricted;
      for (int i : order.ranking())
        if (contains(menu, i)) restricted.push_back(i);
      // the restricted "order" ranks menu members; its top must agree
      CHECK(maximal(order, menu) == restricted.front());
    }
  }
}

TEST_CASE("joint rules validate their tables", "[core]") {
  AlternativeSet xs({"a", "b"});
  AlternativeSet ys({"c", "d"});
  std::map<BudgetPair, ProbabilityTable> tables;
  tables[{xs.full(), ys.full()}] = {{{0, 0}, Rational(1, 2)}, {{1, 1}, Rational(1, 2)}};

  SECTION("sum constraint") {
    tables[{xs.full(), ys.full()}][{1, 1}] = Rational(1, 3);
    CHECK_THROWS_AS(JointChoiceRule(xs, ys, tables, false), FormatError);
  }
  SECTION("cells outside the budget pair") {
    tables[{1u, ys.full()}] = {{{1, 0}, Rational(1)}};  // x index 1 not in budget {a}
    CHECK_THROWS_AS(JointChoiceRule(xs, ys, tables, false), FormatError);
  }
  SECTION("negative cells") {
    tables[{xs.full(), ys.full()}][{0, 1}] = Rational(-1, 2);
    tables[{xs.full(), ys.full()}][{1, 0}] = Rational(1, 2);
    CHECK_THROWS_AS(JointChoiceRule(xs, ys, tables, false), FormatError);
  }
  SECTION("completeness flag requires every budget pair") {
    CHECK_THROWS_AS(JointChoiceRule(xs, ys, tables, true), FormatError);
  }
}

TEST_CASE("induction from a delta order pair is degenerate maximization", "[core]") {
  AlternativeSet xs({"a", "b", "c", "d"});
  AlternativeSet ys({"w", "x", "y", "z"});
  auto delta = pair_measure({{"a>b>c>d", "w>x>y>z", Rational(1)}}, xs, ys);
  JointChoiceRule rule = induce_from_order_pairs(delta, xs, ys);
  REQUIRE(rule.complete());
  for (auto [a, b] : all_budget_pairs(xs, ys)) {
    Cell expected{maximal(order_of("a>b>c>d", xs), a), maximal(order_of("w>x>y>z", ys), b)};
    CHECK(rule.probability(expected.first, expected.second, a, b) == 1);
  }
  // in particular p(a,w|A,B) = 1 whenever a and w are available
  for (auto [a, b] : all_budget_pairs(xs, ys))
    if (contains(a, 0) && contains(b, 0)) CHECK(rule.probability(0, 0, a, b) == 1);
}

TEST_CASE("induction matches the counterexample mixture on the full budgets", "[core]") {
  AlternativeSet xs({"a", "b", "c", "d"});
  AlternativeSet ys({"w", "x", "y", "z"});
  auto nu1 = pair_measure(
      {{"a>b>c>d", "w>x>y>z", Rational(1, 2)}, {"b>a>d>c", "x>w>z>y", Rational(1, 2)}}, xs, ys);
  JointChoiceRule rule = induce_from_order_pairs(nu1, xs, ys);
  CHECK(rule.probability(xs.index_of("a"), ys.index_of("w"), xs.full(), ys.full()) == Rational(1, 2));
  CHECK(rule.probability(xs.index_of("b"), ys.index_of("x"), xs.full(), ys.full()) == Rational(1, 2));
  CHECK(rule.table(xs.full(), ys.full()).size() == 2);
}

TEST_CASE("induction enumerates maxima of a two-pair mixture", "[core]") {
  AlternativeSet xs({"a", "b", "c"});
  AlternativeSet ys({"x", "y"});
  auto nu =
      pair_measure({{"a>b>c", "x>y", Rational(1, 2)}, {"c>b>a", "y>x", Rational(1, 2)}}, xs, ys);
  JointChoiceRule rule = induce_from_order_pairs(nu, xs, ys);
  CHECK(rule.probability(xs.index_of("a"), ys.index_of("x"), xs.full(), ys.full()) == Rational(1, 2));
  CHECK(rule.probability(xs.index_of("c"), ys.index_of("y"), xs.full(), ys.full()) == Rational(1, 2));
  CHECK(rule.table(xs.full(), ys.full()).size() == 2);
}

TEST_CASE("signed measures inducing negative cells are rejected", "[core]") {
  AlternativeSet xs({"a", "b"});
  AlternativeSet ys({"c", "d"});
  // -1 weight on a pair that is the sole chooser of (b,d) from ({b},{d})
  auto signed_measure = pair_measure(
      {{"a>b", "c>d", Rational(1)}, {"b>a", "d>c", Rational(-1)}, {"a>b", "d>c", Rational(1)}}, xs, ys);
  CHECK_THROWS_AS(induce_from_order_pairs(signed_measure, xs, ys), PreconditionError);
  // raw cells remain available for caller-side tests
  auto cells = induce_cells_from_order_pairs(signed_measure, all_budget_pairs(xs, ys));
  CHECK(cells[{xs.mask_of({"b"}), ys.mask_of({"d"})}][{1, 1}] == 1);
}

TEST_CASE("choice-pair induction", "[core]") {
  AlternativeSet xs({"a", "b"});
  AlternativeSet ys({"c", "d"});
  ChoiceFunction c1a, c1b, c2a, c2b;
  for (Mask m : nonempty_subsets(xs.full())) c1a.picks[m] = lowest_element(m);
  for (Mask m : nonempty_subsets(xs.full())) c1b.picks[m] = elements_of(m).back();
  for (Mask m : nonempty_subsets(ys.full())) c2a.picks[m] = lowest_element(m);
  for (Mask m : nonempty_subsets(ys.full())) c2b.picks[m] = elements_of(m).back();

  SECTION("delta selects the picks everywhere") {
    SignedChoicePairMeasure delta({{{c1a, c2b}, Rational(1)}});
    JointChoiceRule rule = induce_from_choice_pairs(delta, xs, ys, all_budget_pairs(xs, ys));
    for (auto [a, b] : all_budget_pairs(xs, ys))
      CHECK(rule.probability(c1a.pick(a), c2b.pick(b), a, b) == 1);
  }
  SECTION("two pairs at a half each give half/half blocks") {
    SignedChoicePairMeasure mix({{{c1a, c2a}, Rational(1, 2)}, {{c1b, c2b}, Rational(1, 2)}});
    JointChoiceRule rule = induce_from_choice_pairs(mix, xs, ys, all_budget_pairs(xs, ys));
    CHECK(rule.probability(0, 0, xs.full(), ys.full()) == Rational(1, 2));
    CHECK(rule.probability(1, 1, xs.full(), ys.full()) == Rational(1, 2));
    CHECK(rule.probability(0, 0, xs.mask_of({"a"}), ys.full()) == Rational(1, 2));
    CHECK(rule.probability(0, 1, xs.mask_of({"a"}), ys.full()) == Rational(1, 2));
  }
  SECTION("weights 3/4 and 1/4 land cells in {0, 1/4, 3/4, 1}") {
    SignedChoicePairMeasure mix({{{c1a, c2a}, Rational(3, 4)}, {{c1b, c2b}, Rational(1, 4)}});
    JointChoiceRule rule = induce_from_choice_pairs(mix, xs, ys, all_budget_pairs(xs, ys));
    for (const auto& [bp, table] : rule.tables())
      for (const auto& [cell, v] : table)
        CHECK((v == Rational(1, 4) || v == Rational(3, 4) || v == Rational(1)));
  }
}

TEST_CASE("marginal rules", "[core]") {
  SECTION("the complete counterexample rule splits {c,d} evenly") {
    auto fx = fixture("example1");
    auto [p1, p2] = marginal_rules(fx.rule);
    const auto& xs = fx.rule.x_set();
    CHECK(p1.probability(xs.index_of("c"), xs.mask_of({"c", "d"})) == Rational(1, 2));
    CHECK(p1.probability(xs.index_of("d"), xs.mask_of({"c", "d"})) == Rational(1, 2));
  }
  SECTION("degenerate rule from one order pair maximizes") {
    AlternativeSet xs({"a", "b", "c"});
    AlternativeSet ys({"x", "y"});
    auto delta = pair_measure({{"b>c>a", "y>x", Rational(1)}}, xs, ys);
    auto [p1, p2] = marginal_rules(induce_from_order_pairs(delta, xs, ys));
    auto order = order_of("b>c>a", xs);
    for (Mask menu : nonempty_subsets(xs.full()))
      for (int x : elements_of(menu))
        CHECK(p1.probability(x, menu) == (x == maximal(order, menu) ? 1 : 0));
  }
  SECTION("partial rules missing the full opposite budget are rejected") {
    auto fx = fixture("table1");
    CHECK_THROWS_AS(marginal_rules(fx.rule), PreconditionError);
  }
}

TEST_CASE("measures must sum to one", "[core]") {
  AlternativeSet xs({"a", "b"});
  std::map<LinearOrder, Rational> weights;
  weights[order_of("a>b", xs)] = Rational(1, 2);
  CHECK_THROWS_AS(SignedOrderMeasure(weights), FormatError);
  weights[order_of("b>a", xs)] = Rational(1, 2);
  CHECK_NOTHROW(SignedOrderMeasure(weights));
}
