#pragma once

// Built-in fixtures and deterministic random-instance generators. Fixtures
// are also shipped as dataset files under fixtures/; the constructors here
// are the source of truth and a test keeps the two in sync.

#include <random>
#include <string>

#include "jointchoice/core.hpp"

namespace jointchoice {

struct Fixture {
  std::string name;
  JointChoiceRule rule;
  std::string notes;
};

namespace detail {

inline ProbabilityTable half_half(Cell first, Cell second) {
  ProbabilityTable t;
  t[first] += Rational(1, 2);
  t[second] += Rational(1, 2);
  return t;
}

}  // namespace detail

// Two printed tables over ({x1,x2,x3},{y1,y2,y3}) and ({x1,x2,x3},{y1,y2});
// partial, with identical agent-1 margins (1/2, 2/5, 1/10) in both.
inline Fixture fixture_table1() {
  AlternativeSet xs({"x1", "x2", "x3"});
  AlternativeSet ys({"y1", "y2", "y3"});
  std::map<BudgetPair, ProbabilityTable> tables;
  ProbabilityTable t1;
  t1[{0, 0}] = Rational(1, 5);
  t1[{0, 2}] = Rational(3, 10);
  t1[{1, 0}] = Rational(1, 10);
  t1[{1, 1}] = Rational(3, 10);
  t1[{2, 2}] = Rational(1, 10);
  tables[{xs.full(), ys.full()}] = std::move(t1);
  ProbabilityTable t2;
  t2[{0, 0}] = Rational(3, 10);
  t2[{0, 1}] = Rational(1, 5);
  t2[{1, 0}] = Rational(1, 10);
  t2[{1, 1}] = Rational(3, 10);
  t2[{2, 1}] = Rational(1, 10);
  tables[{xs.full(), ys.mask_of({"y1", "y2"})}] = std::move(t2);
  return {"table1", JointChoiceRule(xs, ys, std::move(tables), /*complete=*/false),
          "two budget pairs with matching agent-1 margins"};
}

// Four half/half blocks over {w,x},{y,z} x {a,b},{c,d}; satisfies the
// pairwise margin comparisons but admits no separable mixture.
inline Fixture fixture_table2() {
  AlternativeSet xs({"w", "x", "y", "z"});
  AlternativeSet ys({"a", "b", "c", "d"});
  Mask wx = xs.mask_of({"w", "x"});
  Mask yz = xs.mask_of({"y", "z"});
  Mask ab = ys.mask_of({"a", "b"});
  Mask cd = ys.mask_of({"c", "d"});
  int w = xs.index_of("w"), x = xs.index_of("x"), y = xs.index_of("y"), z = xs.index_of("z");
  int a = ys.index_of("a"), b = ys.index_of("b"), c = ys.index_of("c"), d = ys.index_of("d");
  std::map<BudgetPair, ProbabilityTable> tables;
  tables[{wx, ab}] = detail::half_half({w, a}, {x, b});
  tables[{wx, cd}] = detail::half_half({w, c}, {x, d});
  tables[{yz, ab}] = detail::half_half({y, a}, {z, b});
  tables[{yz, cd}] = detail::half_half({y, d}, {z, c});
  return {"table2", JointChoiceRule(xs, ys, std::move(tables), /*complete=*/false),
          "partial rule that no mixture of separable choice-function pairs reproduces"};
}

// The complete counterexample rule: one mixture of full order pairs governs
// every budget pair except those inside {c,d} x {y,z}, where a second
// mixture with the opposite coupling takes over. Satisfies marginality and
// non-negativity yet is not a mixture of order pairs.
inline Fixture fixture_example1() {
  AlternativeSet xs({"a", "b", "c", "d"});
  AlternativeSet ys({"w", "x", "y", "z"});
  int a = 0, b = 1, c = 2, d = 3;
  int w = 0, x = 1, y = 2, z = 3;
  LinearOrder x1({a, b, c, d}, 4), x2({b, a, d, c}, 4);
  LinearOrder y1({w, x, y, z}, 4), y2({x, w, z, y}, 4);
  Mask cd = xs.mask_of({"c", "d"});
  Mask yz = ys.mask_of({"y", "z"});

  std::map<BudgetPair, ProbabilityTable> tables;
  for (auto [A, B] : all_budget_pairs(xs, ys)) {
    ProbabilityTable table;
    if (subset_of(A, cd) && subset_of(B, yz)) {
      // (d over c, y over z) and (c over d, z over y), half each
      int first_x = contains(A, d) ? d : c;
      int first_y = contains(B, y) ? y : z;
      int second_x = contains(A, c) ? c : d;
      int second_y = contains(B, z) ? z : y;
      table[{first_x, first_y}] += Rational(1, 2);
      table[{second_x, second_y}] += Rational(1, 2);
    } else {
      table[{maximal(x1, A), maximal(y1, B)}] += Rational(1, 2);
      table[{maximal(x2, A), maximal(y2, B)}] += Rational(1, 2);
    }
    tables[{A, B}] = std::move(table);
  }
  return {"example1", JointChoiceRule(xs, ys, std::move(tables), /*complete=*/true),
          "complete rule passing marginality and non-negativity with no order-pair mixture"};
}

// Maximization of a single joint ranking over X x Y; complete, with a
// negative polynomial at ({a},{c}).
inline Fixture fixture_remark_rule() {
  AlternativeSet xs({"a", "b"});
  AlternativeSet ys({"c", "d"});
  int a = 0, b = 1, c = 0, d = 1;
  std::vector<Cell> ranking = {{b, d}, {a, c}, {a, d}, {b, c}};
  std::map<BudgetPair, ProbabilityTable> tables;
  for (auto [A, B] : all_budget_pairs(xs, ys)) {
    for (const Cell& cell : ranking) {
      if (contains(A, cell.first) && contains(B, cell.second)) {
        tables[{A, B}][cell] = 1;
        break;
      }
    }
  }
  return {"remark_rule", JointChoiceRule(xs, ys, std::move(tables), /*complete=*/true),
          "joint-order maximization; violates non-negativity at ({a},{c})"};
}

inline Fixture fixture(const std::string& name) {
  if (name == "table1") return fixture_table1();
  if (name == "table2") return fixture_table2();
  if (name == "example1") return fixture_example1();
  if (name == "remark_rule") return fixture_remark_rule();
  throw PreconditionError("unknown fixture '" + name + "'");
}

// ---------------------------------------------------------------------------
// Generators

enum class GeneratorMode {
  kProbabilityPairMeasure,
  kSignedPairMeasure,
  kArbitraryRule,
  kMarginalityViolatingRule,
};

struct GeneratorSpec {
  std::uint64_t seed = 0;
  int x_size = 3;
  int y_size = 3;
  int support = 3;  // order pairs drawn before merging
  GeneratorMode mode = GeneratorMode::kProbabilityPairMeasure;
};

struct GeneratedInstance {
  JointChoiceRule rule;
  std::optional<SignedPairMeasure> measure;  // the generator, in measure modes
};

namespace detail {

// mt19937_64 has a standardized stream, and we only consume raw draws, so
// identical specs give identical instances on every platform.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

inline LinearOrder random_order(DeterministicRng& rng, int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  return LinearOrder(std::move(perm), n);
}

inline SignedPairMeasure random_pair_measure(DeterministicRng& rng, const GeneratorSpec& spec,
                                             bool signed_weights) {
  while (true) {
    std::vector<OrderPair> pairs;
    for (int i = 0; i < spec.support; ++i)
      pairs.push_back({random_order(rng, spec.x_size), random_order(rng, spec.y_size)});
    std::vector<long long> raw(spec.support);
    long long total = 0;
    for (auto& v : raw) {
      if (signed_weights) {
        long long t = static_cast<long long>(rng.below(12));
        v = t < 4 ? -(t + 1) : t - 3;  // -4..-1 or 1..8
      } else {
        v = 1 + static_cast<long long>(rng.below(8));  // 1..8
      }
      total += v;
    }
    if (total == 0) continue;  // weights must normalize; redraw
    std::map<OrderPair, Rational> weights;
    for (int i = 0; i < spec.support; ++i) weights[pairs[i]] += make_rational(raw[i], total);
    return SignedPairMeasure(std::move(weights));
  }
}

inline JointChoiceRule random_arbitrary_rule(DeterministicRng& rng, const GeneratorSpec& spec) {
  AlternativeSet xs([&] {
    std::vector<std::string> l;
    for (int i = 0; i < spec.x_size; ++i) l.push_back("x" + std::to_string(i + 1));
    return l;
  }());
  AlternativeSet ys([&] {
    std::vector<std::string> l;
    for (int i = 0; i < spec.y_size; ++i) l.push_back("y" + std::to_string(i + 1));
    return l;
  }());
  std::map<BudgetPair, ProbabilityTable> tables;
  for (auto [a, b] : all_budget_pairs(xs, ys)) {
    std::vector<Cell> cells;
    for (int x : elements_of(a))
      for (int y : elements_of(b)) cells.push_back({x, y});
    std::vector<long long> mass(cells.size());
    long long total = 0;
    for (auto& m : mass) {
      m = static_cast<long long>(rng.below(8));
      total += m;
    }
    if (total == 0) {
      mass.back() = 1;
      total = 1;
    }
    ProbabilityTable table;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (mass[i] != 0) table[cells[i]] = Rational(mass[i], total);
    tables[{a, b}] = std::move(table);
  }
  return JointChoiceRule(xs, ys, std::move(tables), /*complete=*/true);
}

}  // namespace detail

inline std::vector<std::string> default_labels(char prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(std::string(1, prefix) + std::to_string(i + 1));
  return out;
}

inline GeneratedInstance generate(const GeneratorSpec& spec) {
  if (spec.x_size < 1 || spec.x_size > 6 || spec.y_size < 1 || spec.y_size > 6)
    throw PreconditionError("generator sizes are capped at 6 alternatives per agent");
  if (spec.support < 1 || spec.support > 8)
    throw PreconditionError("generator support is capped at 8 order pairs");
  detail::DeterministicRng rng(spec.seed);
  AlternativeSet xs(default_labels('x', spec.x_size));
  AlternativeSet ys(default_labels('y', spec.y_size));

  switch (spec.mode) {
    case GeneratorMode::kProbabilityPairMeasure: {
      SignedPairMeasure measure = detail::random_pair_measure(rng, spec, /*signed_weights=*/false);
      JointChoiceRule rule = induce_from_order_pairs(measure, xs, ys);
      return {std::move(rule), std::move(measure)};
    }
    case GeneratorMode::kSignedPairMeasure: {
      // Signed generators can induce negative cells, which are not rules at
      // all; redraw until the induced cells are proper probabilities.
      while (true) {
        SignedPairMeasure measure = detail::random_pair_measure(rng, spec, /*signed_weights=*/true);
        try {
          JointChoiceRule rule = induce_from_order_pairs(measure, xs, ys);
          return {std::move(rule), std::move(measure)};
        } catch (const PreconditionError&) {
          continue;
        }
      }
    }
    case GeneratorMode::kArbitraryRule:
      return {detail::random_arbitrary_rule(rng, spec), std::nullopt};
    case GeneratorMode::kMarginalityViolatingRule: {
      if (spec.x_size < 2 || spec.y_size < 2)
        throw PreconditionError("marginality-violating generation needs at least two alternatives per agent");
      SignedPairMeasure measure = detail::random_pair_measure(rng, spec, /*signed_weights=*/false);
      JointChoiceRule rule = induce_from_order_pairs(measure, xs, ys);
      // Move half of one positive cell to another row of the same table.
      // Row sums at that (A,B) then differ from the (A,Y) reference by a
      // strictly positive amount, so marginality provably fails.
      for (const auto& [bp, table] : rule.tables()) {
        auto [a, b] = bp;
        if (set_size(a) < 2 || b == ys.full()) continue;
        for (const auto& [cell, p] : table) {
          int x2 = -1;
          for (int cand : elements_of(a))
            if (cand != cell.first) {
              x2 = cand;
              break;
            }
          std::map<BudgetPair, ProbabilityTable> tables = rule.tables();
          Rational epsilon = p / 2;
          tables[bp][cell] -= epsilon;
          tables[bp][{x2, cell.second}] += epsilon;
          return {JointChoiceRule(xs, ys, std::move(tables), /*complete=*/true), std::nullopt};
        }
      }
      throw InternalError("no perturbable cell found");
    }
  }
  throw PreconditionError("unknown generator mode");
}

}  // namespace jointchoice
