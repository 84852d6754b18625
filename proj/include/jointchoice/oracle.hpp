#pragma once

// Independent ground truth: direct reconstruction checks, the order-event
// measures that mirror the polynomials, exact LP feasibility for the two
// separability notions, and brute-force uniqueness testing for single-agent
// marginals. Everything here stays independent of the constructive
// decomposition path it is used to check.

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "jointchoice/moebius.hpp"
#include "jointchoice/simplex.hpp"

namespace jointchoice {

// ---------------------------------------------------------------------------
// Order events

// The event of orders ranking everything outside A above x above the rest
// of A; its measure equals the single-agent polynomial q(x,A).
struct MSetQuery {
  int x = 0;
  int y = 0;
  Mask a = 0;
  Mask b = 0;
};

// sigma lies in M(x,A) exactly when its path uses the edge (x,A): the top
// |X\A| ranks are X\A and the next is x.
inline bool order_in_mset(const LinearOrder& order, int x, Mask a, Mask ground_full) {
  Mask outside = ground_full & ~a;
  int k = set_size(outside);
  Mask top = 0;
  for (int p = 0; p < k; ++p) top = with(top, order.at_rank(p));
  return top == outside && order.at_rank(k) == x;
}

inline Rational mset_measure(const SignedOrderMeasure& measure, int x, Mask a, Mask ground_full) {
  Rational total = 0;
  for (const auto& [order, w] : measure.weights())
    if (order_in_mset(order, x, a, ground_full)) total += w;
  return total;
}

inline Rational mset_measure(const SignedPairMeasure& measure, const MSetQuery& query, Mask x_full,
                             Mask y_full) {
  if (!contains(query.a, query.x) || !contains(query.b, query.y))
    throw PreconditionError("M-set query must satisfy x in A and y in B");
  Rational total = 0;
  for (const auto& [pair, w] : measure.weights())
    if (order_in_mset(pair.first, query.x, query.a, x_full) &&
        order_in_mset(pair.second, query.y, query.b, y_full))
      total += w;
  return total;
}

// ---------------------------------------------------------------------------
// Measure verification

namespace detail {

inline void compare_cells(const ProbabilityTable& expected, const ProbabilityTable& actual,
                          const JointChoiceRule& rule, Mask a, Mask b, AxiomReport& report) {
  for (int x : elements_of(a))
    for (int y : elements_of(b)) {
      auto find = [&](const ProbabilityTable& t) {
        auto it = t.find({x, y});
        return it == t.end() ? Rational(0) : it->second;
      };
      Rational want = find(expected), got = find(actual);
      if (want != got)
        report.add({"reproduction",
                    {{"x", rule.x_set().label(x)},
                     {"y", rule.y_set().label(y)},
                     {"A", rule.x_set().describe(a)},
                     {"B", rule.y_set().describe(b)}},
                    got,
                    want});
    }
}

}  // namespace detail

// Passes when (i) the measure induces exactly the rule's cells on the
// rule's domain, and (ii) for complete rules every polynomial equals the
// measure of its order event.
inline AxiomReport verify_measure(const JointChoiceRule& rule, const SignedPairMeasure& measure) {
  for (const auto& [pair, w] : measure.weights())
    if (pair.first.size() != rule.x_set().size() || pair.second.size() != rule.y_set().size())
      throw PreconditionError("measure ground sets do not match the rule");
  AxiomReport report;
  std::vector<BudgetPair> budgets;
  for (const auto& [bp, table] : rule.tables()) budgets.push_back(bp);
  auto induced = induce_cells_from_order_pairs(measure, budgets);
  for (const auto& [bp, table] : rule.tables())
    detail::compare_cells(table, induced[bp], rule, bp.first, bp.second, report);

  if (rule.complete()) {
    BlockMarschakTable bm = bm_joint(rule);
    Mask x_full = rule.x_set().full();
    Mask y_full = rule.y_set().full();
    for (Mask a : nonempty_subsets(x_full))
      for (Mask b : nonempty_subsets(y_full))
        for (int x : elements_of(a))
          for (int y : elements_of(b)) {
            Rational event = mset_measure(measure, {x, y, a, b}, x_full, y_full);
            if (event != bm.at(a, b, x, y))
              report.add({"mset-identity",
                          {{"x", rule.x_set().label(x)},
                           {"y", rule.y_set().label(y)},
                           {"A", rule.x_set().describe(a)},
                           {"B", rule.y_set().describe(b)}},
                          event,
                          bm.at(a, b, x, y)});
          }
  }
  return report;
}

inline AxiomReport verify_measure(const JointChoiceRule& rule, const SignedChoicePairMeasure& measure) {
  AxiomReport report;
  std::vector<BudgetPair> budgets;
  for (const auto& [bp, table] : rule.tables()) budgets.push_back(bp);
  auto induced = induce_cells_from_choice_pairs(measure, budgets);
  for (const auto& [bp, table] : rule.tables())
    detail::compare_cells(table, induced[bp], rule, bp.first, bp.second, report);
  return report;
}

inline AxiomReport verify_measure(const RandomChoiceRule& rule, const SignedOrderMeasure& measure) {
  for (const auto& [order, w] : measure.weights())
    if (order.size() != rule.ground().size())
      throw PreconditionError("measure ground set does not match the rule");
  AxiomReport report;
  Mask full = rule.ground().full();
  auto induced = induce_cells_from_orders(measure, rule.ground());
  for (Mask menu : nonempty_subsets(full))
    for (int x : elements_of(menu)) {
      auto it = induced.find({menu, x});
      Rational got = it == induced.end() ? Rational(0) : it->second;
      if (got != rule.probability(x, menu))
        report.add({"reproduction",
                    {{"x", rule.ground().label(x)}, {"A", rule.ground().describe(menu)}},
                    got,
                    rule.probability(x, menu)});
    }
  SingleAgentBM bm = bm_single(rule);
  for (Mask menu : nonempty_subsets(full))
    for (int x : elements_of(menu)) {
      Rational event = mset_measure(measure, x, menu, full);
      if (event != bm.at(menu, x))
        report.add({"mset-identity",
                    {{"x", rule.ground().label(x)}, {"A", rule.ground().describe(menu)}},
                    event,
                    bm.at(menu, x)});
    }
  return report;
}

// ---------------------------------------------------------------------------
// LP feasibility oracles

struct LpOracleOptions {
  std::size_t cap = 0;                 // 0 = use the operation default
  bool reverse_variable_order = false;  // verdicts must not depend on this
};

template <typename MeasureT>
struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<MeasureT> certificate;
  Rational infeasibility;  // phase-1 gap, > 0 when infeasible
};

inline constexpr std::size_t kDefaultOrderPairCap = 50000;
inline constexpr std::size_t kDefaultChoicePairCap = 100000;

namespace detail {

// Per-order path edges by level: level k holds (set before the k-th
// removal, removed element).
inline std::vector<std::pair<Mask, int>> path_edges(const LinearOrder& order) {
  std::vector<std::pair<Mask, int>> edges;
  Mask current = full_mask(order.size());
  for (int x : order.ranking()) {
    edges.push_back({current, x});
    current = without(current, x);
  }
  return edges;
}

}  // namespace detail

// Is the rule a probability mixture of order pairs, each agent maximizing
// their own order? Exact LP over the order-pair simplex. Variables whose
// order events carry zero polynomial mass are forced to zero and dropped
// before the solve; with nonnegative variables that pruning is exact.
inline FeasibilityVerdict<SignedPairMeasure> lp_separable_rum(const JointChoiceRule& rule,
                                                              const LpOracleOptions& options = {}) {
  if (!rule.complete())
    throw PreconditionError("separable random utility LP requires a complete rule");
  std::size_t cap = options.cap ? options.cap : kDefaultOrderPairCap;
  std::size_t order_pairs = 1;
  auto saturating_mul = [&](std::size_t factor) {
    if (order_pairs > cap) return;  // already over; avoid overflow
    order_pairs *= factor;
  };
  for (int i = 2; i <= rule.x_set().size(); ++i) saturating_mul(i);
  for (int i = 2; i <= rule.y_set().size(); ++i) saturating_mul(i);
  if (order_pairs > cap)
    throw PreconditionError("order pair count exceeds cap " + std::to_string(cap));

  BlockMarschakTable bm = bm_joint(rule);
  auto x_orders = all_orders(rule.x_set().size());
  auto y_orders = all_orders(rule.y_set().size());
  std::vector<std::vector<std::pair<Mask, int>>> x_edges, y_edges;
  for (const auto& o : x_orders) x_edges.push_back(detail::path_edges(o));
  for (const auto& o : y_orders) y_edges.push_back(detail::path_edges(o));

  // surviving variables: all their polynomial cells are nonzero
  std::vector<std::pair<std::size_t, std::size_t>> vars;
  for (std::size_t i = 0; i < x_orders.size(); ++i)
    for (std::size_t j = 0; j < y_orders.size(); ++j) {
      bool alive = true;
      for (const auto& [a, x] : x_edges[i]) {
        for (const auto& [b, y] : y_edges[j])
          if (bm.at(a, b, x, y) == 0) {
            alive = false;
            break;
          }
        if (!alive) break;
      }
      if (alive) vars.push_back({i, j});
    }
  if (options.reverse_variable_order) std::reverse(vars.begin(), vars.end());

  // one equality per nonzero polynomial cell, plus total mass
  LinearProgram lp;
  lp.num_vars = vars.size();
  Mask x_full = rule.x_set().full();
  Mask y_full = rule.y_set().full();
  for (Mask a : nonempty_subsets(x_full))
    for (Mask b : nonempty_subsets(y_full))
      for (int x : elements_of(a))
        for (int y : elements_of(b)) {
          const Rational& q = bm.at(a, b, x, y);
          if (q == 0) continue;
          std::vector<Rational> row(vars.size(), Rational(0));
          for (std::size_t v = 0; v < vars.size(); ++v) {
            auto [i, j] = vars[v];
            if (order_in_mset(x_orders[i], x, a, x_full) && order_in_mset(y_orders[j], y, b, y_full))
              row[v] = 1;
          }
          lp.rows.push_back(std::move(row));
          lp.rhs.push_back(q);
        }
  lp.rows.push_back(std::vector<Rational>(vars.size(), Rational(1)));
  lp.rhs.push_back(1);

  LpSolution solution = solve_feasibility(lp);
  FeasibilityVerdict<SignedPairMeasure> verdict;
  if (solution.status == LpStatus::kInfeasible) {
    verdict.feasible = false;
    verdict.infeasibility = solution.objective;
    return verdict;
  }
  std::map<OrderPair, Rational> weights;
  for (std::size_t v = 0; v < vars.size(); ++v)
    if (solution.point[v] != 0) weights[{x_orders[vars[v].first], y_orders[vars[v].second]}] =
        solution.point[v];
  verdict.feasible = true;
  verdict.certificate = SignedPairMeasure(std::move(weights));
  return verdict;
}

// Is the (possibly partial) rule a probability mixture of separable
// deterministic choice-function pairs on the queried budget pairs?
// Restricted choice functions are tuples of per-budget selections over only
// the budgets appearing in the collection.
inline FeasibilityVerdict<SignedChoicePairMeasure> lp_stochastic_separability(
    const JointChoiceRule& rule, std::vector<BudgetPair> budget_pairs = {},
    const LpOracleOptions& options = {}) {
  if (budget_pairs.empty())
    for (const auto& [bp, table] : rule.tables()) budget_pairs.push_back(bp);
  for (auto [a, b] : budget_pairs)
    if (!rule.has_table(a, b))
      throw PreconditionError("queried budget pair " + rule.x_set().describe(a) + "x" +
                              rule.y_set().describe(b) + " is not present in the rule");
  std::sort(budget_pairs.begin(), budget_pairs.end());
  budget_pairs.erase(std::unique(budget_pairs.begin(), budget_pairs.end()), budget_pairs.end());

  std::vector<Mask> x_budgets, y_budgets;
  for (auto [a, b] : budget_pairs) {
    x_budgets.push_back(a);
    y_budgets.push_back(b);
  }
  auto dedupe = [](std::vector<Mask>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(x_budgets);
  dedupe(y_budgets);

  auto enumerate = [](const std::vector<Mask>& budgets) {
    std::vector<ChoiceFunction> out;
    std::vector<std::vector<int>> options_per_budget;
    for (Mask b : budgets) options_per_budget.push_back(elements_of(b));
    std::vector<std::size_t> cursor(budgets.size(), 0);
    while (true) {
      ChoiceFunction c;
      for (std::size_t i = 0; i < budgets.size(); ++i) c.picks[budgets[i]] = options_per_budget[i][cursor[i]];
      out.push_back(std::move(c));
      std::size_t i = 0;
      while (i < budgets.size() && ++cursor[i] == options_per_budget[i].size()) cursor[i++] = 0;
      if (i == budgets.size()) break;
    }
    return out;
  };

  std::size_t cap = options.cap ? options.cap : kDefaultChoicePairCap;
  std::size_t pair_count = 1;
  bool over = false;
  for (Mask b : x_budgets) {
    pair_count *= set_size(b);
    if (pair_count > cap) over = true;
  }
  for (Mask b : y_budgets) {
    if (over) break;
    pair_count *= set_size(b);
    if (pair_count > cap) over = true;
  }
  if (over || pair_count > cap)
    throw PreconditionError("restricted choice-function pair count exceeds cap " + std::to_string(cap));

  auto c1s = enumerate(x_budgets);
  auto c2s = enumerate(y_budgets);

  std::vector<std::pair<std::size_t, std::size_t>> vars;
  for (std::size_t i = 0; i < c1s.size(); ++i)
    for (std::size_t j = 0; j < c2s.size(); ++j) {
      bool alive = true;
      for (auto [a, b] : budget_pairs)
        if (rule.probability(c1s[i].pick(a), c2s[j].pick(b), a, b) == 0) {
          alive = false;
          break;
        }
      if (alive) vars.push_back({i, j});
    }
  if (options.reverse_variable_order) std::reverse(vars.begin(), vars.end());

  LinearProgram lp;
  lp.num_vars = vars.size();
  for (auto [a, b] : budget_pairs)
    for (const auto& [cell, p] : rule.table(a, b)) {
      std::vector<Rational> row(vars.size(), Rational(0));
      for (std::size_t v = 0; v < vars.size(); ++v) {
        auto [i, j] = vars[v];
        if (c1s[i].pick(a) == cell.first && c2s[j].pick(b) == cell.second) row[v] = 1;
      }
      lp.rows.push_back(std::move(row));
      lp.rhs.push_back(p);
    }
  lp.rows.push_back(std::vector<Rational>(vars.size(), Rational(1)));
  lp.rhs.push_back(1);

  LpSolution solution = solve_feasibility(lp);
  FeasibilityVerdict<SignedChoicePairMeasure> verdict;
  if (solution.status == LpStatus::kInfeasible) {
    verdict.feasible = false;
    verdict.infeasibility = solution.objective;
    return verdict;
  }
  std::map<ChoiceFunctionPair, Rational> weights;
  for (std::size_t v = 0; v < vars.size(); ++v)
    if (solution.point[v] != 0) weights[{c1s[vars[v].first], c2s[vars[v].second]}] = solution.point[v];
  verdict.feasible = true;
  verdict.certificate = SignedChoicePairMeasure(std::move(weights));
  return verdict;
}

// ---------------------------------------------------------------------------
// Brute-force uniqueness

enum class UniquenessKind { kNotRationalizable, kUnique, kNonUnique };

struct BruteForceUniqueness {
  UniquenessKind kind = UniquenessKind::kNotRationalizable;
  std::optional<SignedOrderMeasure> first;   // the representation (unique), or one of two
  std::optional<SignedOrderMeasure> second;  // a second, distinct representation
};

// Decides uniqueness of {mu >= 0, sum mu = 1, mu induces the rule} by exact
// coordinate min/max probing of the solution polytope: the polytope is a
// point exactly when every coordinate range is degenerate.
inline BruteForceUniqueness brute_force_unique_rum(const RandomChoiceRule& rule, int max_ground = 4,
                                                   const LpOracleOptions& options = {}) {
  int n = rule.ground().size();
  if (n > max_ground)
    throw PreconditionError("brute-force uniqueness is capped at ground size " +
                            std::to_string(max_ground));

  SingleAgentBM bm = bm_single(rule);
  Mask full = rule.ground().full();
  auto orders = all_orders(n);

  std::vector<std::size_t> vars;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    bool alive = true;
    for (const auto& [a, x] : detail::path_edges(orders[i]))
      if (bm.at(a, x) == 0) {
        alive = false;
        break;
      }
    if (alive) vars.push_back(i);
  }
  if (options.reverse_variable_order) std::reverse(vars.begin(), vars.end());

  LinearProgram lp;
  lp.num_vars = vars.size();
  for (Mask a : nonempty_subsets(full))
    for (int x : elements_of(a)) {
      const Rational& q = bm.at(a, x);
      if (q == 0) continue;
      std::vector<Rational> row(vars.size(), Rational(0));
      for (std::size_t v = 0; v < vars.size(); ++v)
        if (order_in_mset(orders[vars[v]], x, a, full)) row[v] = 1;
      lp.rows.push_back(std::move(row));
      lp.rhs.push_back(q);
    }
  lp.rows.push_back(std::vector<Rational>(vars.size(), Rational(1)));
  lp.rhs.push_back(1);

  BruteForceUniqueness result;
  if (solve_feasibility(lp).status == LpStatus::kInfeasible) {
    result.kind = UniquenessKind::kNotRationalizable;
    return result;
  }

  auto to_measure = [&](const std::vector<Rational>& point) {
    std::map<LinearOrder, Rational> weights;
    for (std::size_t v = 0; v < vars.size(); ++v)
      if (point[v] != 0) weights[orders[vars[v]]] = point[v];
    return SignedOrderMeasure(std::move(weights));
  };

  for (std::size_t v = 0; v < vars.size(); ++v) {
    std::vector<Rational> objective(vars.size(), Rational(0));
    objective[v] = 1;
    LpSolution lo = minimize(lp, objective);
    LpSolution hi = maximize(lp, objective);
    if (lo.status != LpStatus::kOptimal || hi.status != LpStatus::kOptimal)
      throw InternalError("coordinate probe on a feasible polytope failed");
    if (lo.objective != hi.objective) {
      result.kind = UniquenessKind::kNonUnique;
      result.first = to_measure(lo.point);
      result.second = to_measure(hi.point);
      return result;
    }
  }
  LpSolution any = solve_feasibility(lp);
  result.kind = UniquenessKind::kUnique;
  result.first = to_measure(any.point);
  return result;
}

}  // namespace jointchoice
