#pragma once

// Block-Marschak polynomials by Moebius inversion on the product subset
// lattice, plus the axiom battery: marginality, recursivity, non-negativity.

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <vector>

#include "jointchoice/core.hpp"
#include "jointchoice/report.hpp"

namespace jointchoice {

// Single-agent Block-Marschak polynomials q(x,A), dense over x in A.
struct SingleAgentBM {
  AlternativeSet ground;
  std::vector<Rational> values;

  SingleAgentBM() = default;
  explicit SingleAgentBM(AlternativeSet g)
      : ground(std::move(g)), values((std::size_t(1) << ground.size()) * ground.size()) {}

  Rational& at(Mask menu, int x) { return values[std::size_t(menu) * ground.size() + x]; }
  const Rational& at(Mask menu, int x) const { return values[std::size_t(menu) * ground.size() + x]; }
};

// Two-agent Block-Marschak polynomials q(x,y|A,B), dense over x in A, y in B,
// with per-agent marginal polynomials attached when available.
struct BlockMarschakTable {
  AlternativeSet x_set;
  AlternativeSet y_set;
  std::vector<Rational> joint;
  std::optional<SingleAgentBM> marginal1;
  std::optional<SingleAgentBM> marginal2;

  BlockMarschakTable() = default;
  BlockMarschakTable(AlternativeSet xs, AlternativeSet ys)
      : x_set(std::move(xs)), y_set(std::move(ys)) {
    // the inversion enumerates product supersets, so work and storage grow
    // like 4^(|X|+|Y|)
    if (x_set.size() + y_set.size() > 12)
      throw PreconditionError("joint polynomial tables are capped at |X| + |Y| = 12 alternatives");
    joint.assign((std::size_t(1) << x_set.size()) * (std::size_t(1) << y_set.size()) * x_set.size() *
                     y_set.size(),
                 Rational(0));
  }

  std::size_t index(Mask a, Mask b, int x, int y) const {
    int nx = x_set.size(), ny = y_set.size();
    return ((std::size_t(a) * (std::size_t(1) << ny) + b) * nx + x) * ny + y;
  }
  Rational& at(Mask a, Mask b, int x, int y) { return joint[index(a, b, x, y)]; }
  const Rational& at(Mask a, Mask b, int x, int y) const { return joint[index(a, b, x, y)]; }
};

// ---------------------------------------------------------------------------
// Marginality

// Full check on a complete rule. Each agent-1 row sum is compared to its
// (A,Y) reference, and symmetrically for agent 2; this is equivalent to
// comparing all pairs B,B'.
inline AxiomReport check_marginality(const JointChoiceRule& rule) {
  if (!rule.complete()) throw PreconditionError("marginality check requires a complete rule");
  AxiomReport report;
  Mask x_full = rule.x_set().full();
  Mask y_full = rule.y_set().full();

  for (Mask a : nonempty_subsets(x_full)) {
    std::map<int, Rational> reference;
    for (const auto& [cell, v] : rule.table(a, y_full)) reference[cell.first] += v;
    for (Mask b : nonempty_subsets(y_full)) {
      if (b == y_full) continue;
      std::map<int, Rational> sums;
      for (const auto& [cell, v] : rule.table(a, b)) sums[cell.first] += v;
      for (int x : elements_of(a)) {
        Rational lhs = sums.count(x) ? sums[x] : Rational(0);
        Rational rhs = reference.count(x) ? reference[x] : Rational(0);
        if (lhs != rhs)
          report.add({"marginality",
                      {{"x", rule.x_set().label(x)},
                       {"A", rule.x_set().describe(a)},
                       {"B", rule.y_set().describe(b)},
                       {"B'", rule.y_set().describe(y_full)}},
                      lhs,
                      rhs});
      }
    }
  }
  for (Mask b : nonempty_subsets(y_full)) {
    std::map<int, Rational> reference;
    for (const auto& [cell, v] : rule.table(x_full, b)) reference[cell.second] += v;
    for (Mask a : nonempty_subsets(x_full)) {
      if (a == x_full) continue;
      std::map<int, Rational> sums;
      for (const auto& [cell, v] : rule.table(a, b)) sums[cell.second] += v;
      for (int y : elements_of(b)) {
        Rational lhs = sums.count(y) ? sums[y] : Rational(0);
        Rational rhs = reference.count(y) ? reference[y] : Rational(0);
        if (lhs != rhs)
          report.add({"marginality",
                      {{"y", rule.y_set().label(y)},
                       {"B", rule.y_set().describe(b)},
                       {"A", rule.x_set().describe(a)},
                       {"A'", rule.x_set().describe(x_full)}},
                      lhs,
                      rhs});
      }
    }
  }
  return report;
}

// Partial-data variant: compares row and column sums only among the tables
// actually present, using the canonically first budget as the reference.
inline AxiomReport check_marginality_given(const JointChoiceRule& rule) {
  AxiomReport report;
  std::map<Mask, std::vector<Mask>> by_a, by_b;
  for (const auto& [budgets, table] : rule.tables()) {
    by_a[budgets.first].push_back(budgets.second);
    by_b[budgets.second].push_back(budgets.first);
  }
  for (const auto& [a, bs] : by_a) {
    if (bs.size() < 2) continue;
    std::map<int, Rational> reference;
    for (const auto& [cell, v] : rule.table(a, bs.front())) reference[cell.first] += v;
    for (std::size_t i = 1; i < bs.size(); ++i) {
      std::map<int, Rational> sums;
      for (const auto& [cell, v] : rule.table(a, bs[i])) sums[cell.first] += v;
      for (int x : elements_of(a)) {
        Rational lhs = sums.count(x) ? sums[x] : Rational(0);
        Rational rhs = reference.count(x) ? reference[x] : Rational(0);
        if (lhs != rhs)
          report.add({"marginality",
                      {{"x", rule.x_set().label(x)},
                       {"A", rule.x_set().describe(a)},
                       {"B", rule.y_set().describe(bs[i])},
                       {"B'", rule.y_set().describe(bs.front())}},
                      lhs,
                      rhs});
      }
    }
  }
  for (const auto& [b, as] : by_b) {
    if (as.size() < 2) continue;
    std::map<int, Rational> reference;
    for (const auto& [cell, v] : rule.table(as.front(), b)) reference[cell.second] += v;
    for (std::size_t i = 1; i < as.size(); ++i) {
      std::map<int, Rational> sums;
      for (const auto& [cell, v] : rule.table(as[i], b)) sums[cell.second] += v;
      for (int y : elements_of(b)) {
        Rational lhs = sums.count(y) ? sums[y] : Rational(0);
        Rational rhs = reference.count(y) ? reference[y] : Rational(0);
        if (lhs != rhs)
          report.add({"marginality",
                      {{"y", rule.y_set().label(y)},
                       {"B", rule.y_set().describe(b)},
                       {"A", rule.x_set().describe(as[i])},
                       {"A'", rule.x_set().describe(as.front())}},
                      lhs,
                      rhs});
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Moebius inversion

// q(x,y|A,B) = sum over A' >= A, B' >= B of (-1)^{|A'\A|+|B'\B|} p(x,y|A',B').
// Computed top-down by the recursive form q = p - sum of q over strict
// product supersets, then verified entrywise against the direct alternating
// sum. A mismatch would be an arithmetic bug, never a data condition.
inline BlockMarschakTable bm_joint(const JointChoiceRule& rule) {
  if (!rule.complete())
    throw PreconditionError("Block-Marschak polynomials require a complete rule");
  BlockMarschakTable bm(rule.x_set(), rule.y_set());
  Mask x_full = rule.x_set().full();
  Mask y_full = rule.y_set().full();
  auto x_subsets = nonempty_subsets(x_full);
  auto y_subsets = nonempty_subsets(y_full);

  std::vector<BudgetPair> pairs;
  for (Mask a : x_subsets)
    for (Mask b : y_subsets) pairs.push_back({a, b});
  std::stable_sort(pairs.begin(), pairs.end(), [](BudgetPair l, BudgetPair r) {
    return set_size(l.first) + set_size(l.second) > set_size(r.first) + set_size(r.second);
  });

  for (auto [a, b] : pairs) {
    for (int x : elements_of(a)) {
      for (int y : elements_of(b)) {
        Rational value = rule.probability(x, y, a, b);
        for (Mask a2 : supersets_within(a, x_full))
          for (Mask b2 : supersets_within(b, y_full)) {
            if (a2 == a && b2 == b) continue;
            value -= bm.at(a2, b2, x, y);
          }
        bm.at(a, b, x, y) = value;

        Rational direct = 0;
        for (Mask a2 : supersets_within(a, x_full))
          for (Mask b2 : supersets_within(b, y_full)) {
            int sign_bits = set_size(a2) - set_size(a) + set_size(b2) - set_size(b);
            Rational term = rule.probability(x, y, a2, b2);
            direct += (sign_bits % 2 == 0) ? term : -term;
          }
        if (direct != value)
          throw InternalError("recursive and direct Block-Marschak computations disagree");
      }
    }
  }
  return bm;
}

inline SingleAgentBM bm_single(const RandomChoiceRule& rule) {
  SingleAgentBM bm(rule.ground());
  Mask full = rule.ground().full();
  auto subsets = nonempty_subsets(full);
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](Mask l, Mask r) { return set_size(l) > set_size(r); });
  for (Mask a : subsets) {
    for (int x : elements_of(a)) {
      Rational value = rule.probability(x, a);
      for (Mask a2 : supersets_within(a, full)) {
        if (a2 == a) continue;
        value -= bm.at(a2, x);
      }
      bm.at(a, x) = value;

      Rational direct = 0;
      for (Mask a2 : supersets_within(a, full)) {
        Rational term = rule.probability(x, a2);
        direct += ((set_size(a2) - set_size(a)) % 2 == 0) ? term : -term;
      }
      if (direct != value)
        throw InternalError("recursive and direct Block-Marschak computations disagree");
    }
  }
  return bm;
}

// Single-agent Block-Marschak polynomials of one agent's marginal rule.
inline SingleAgentBM bm_marginal(const JointChoiceRule& rule, int agent) {
  if (agent != 1 && agent != 2) throw PreconditionError("agent must be 1 or 2");
  auto report = check_marginality(rule);
  if (!report.pass)
    throw PreconditionError("rule violates marginality; marginal polynomials are not well defined");
  auto [p1, p2] = marginal_rules(rule, /*check=*/false);
  return bm_single(agent == 1 ? p1 : p2);
}

// Attaches both marginal polynomial tables; requires marginality.
inline BlockMarschakTable bm_table(const JointChoiceRule& rule) {
  BlockMarschakTable bm = bm_joint(rule);
  if (marginality_holds(rule)) {
    bm.marginal1 = bm_marginal(rule, 1);
    bm.marginal2 = bm_marginal(rule, 2);
  }
  return bm;
}

// ---------------------------------------------------------------------------
// Non-negativity and recursivity

inline AxiomReport check_nonnegativity(const BlockMarschakTable& bm) {
  AxiomReport report;
  Mask x_full = bm.x_set.full();
  Mask y_full = bm.y_set.full();
  for (Mask a : nonempty_subsets(x_full))
    for (Mask b : nonempty_subsets(y_full))
      for (int x : elements_of(a))
        for (int y : elements_of(b)) {
          const Rational& q = bm.at(a, b, x, y);
          if (q < 0)
            report.add({"non-negativity",
                        {{"x", bm.x_set.label(x)},
                         {"y", bm.y_set.label(y)},
                         {"A", bm.x_set.describe(a)},
                         {"B", bm.y_set.describe(b)}},
                        q,
                        Rational(0)});
        }
  return report;
}

// Flow identity on the polynomials: for A != X, the mass of q across A
// equals the mass flowing in from one-element extensions of A, per follower
// cell (y,B); and the symmetric statement across B != Y.
inline AxiomReport check_recursivity(const BlockMarschakTable& bm) {
  AxiomReport report;
  Mask x_full = bm.x_set.full();
  Mask y_full = bm.y_set.full();
  for (Mask a : nonempty_subsets(x_full)) {
    if (a == x_full) continue;
    for (Mask b : nonempty_subsets(y_full))
      for (int y : elements_of(b)) {
        Rational lhs = 0, rhs = 0;
        for (int x : elements_of(a)) lhs += bm.at(a, b, x, y);
        for (int z : elements_of(x_full & ~a)) rhs += bm.at(with(a, z), b, z, y);
        if (lhs != rhs)
          report.add({"recursivity",
                      {{"A", bm.x_set.describe(a)},
                       {"B", bm.y_set.describe(b)},
                       {"y", bm.y_set.label(y)}},
                      lhs,
                      rhs});
      }
  }
  for (Mask b : nonempty_subsets(y_full)) {
    if (b == y_full) continue;
    for (Mask a : nonempty_subsets(x_full))
      for (int x : elements_of(a)) {
        Rational lhs = 0, rhs = 0;
        for (int y : elements_of(b)) lhs += bm.at(a, b, x, y);
        for (int v : elements_of(y_full & ~b)) rhs += bm.at(a, with(b, v), x, v);
        if (lhs != rhs)
          report.add({"recursivity",
                      {{"B", bm.y_set.describe(b)},
                       {"A", bm.x_set.describe(a)},
                       {"x", bm.x_set.label(x)}},
                      lhs,
                      rhs});
      }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Inversion round trip

inline JointChoiceRule reconstruct_p(const BlockMarschakTable& bm) {
  Mask x_full = bm.x_set.full();
  Mask y_full = bm.y_set.full();
  std::map<BudgetPair, ProbabilityTable> tables;
  for (Mask a : nonempty_subsets(x_full))
    for (Mask b : nonempty_subsets(y_full)) {
      ProbabilityTable table;
      for (int x : elements_of(a))
        for (int y : elements_of(b)) {
          Rational value = 0;
          for (Mask a2 : supersets_within(a, x_full))
            for (Mask b2 : supersets_within(b, y_full)) value += bm.at(a2, b2, x, y);
          if (value != 0) table[{x, y}] = value;
        }
      tables[{a, b}] = std::move(table);
    }
  return JointChoiceRule(bm.x_set, bm.y_set, std::move(tables), /*complete=*/true);
}

// ---------------------------------------------------------------------------
// Export

// Entries with q != 0 only; descending set sizes, then bitset order.
inline nlohmann::json bm_to_json(const BlockMarschakTable& bm) {
  Mask x_full = bm.x_set.full();
  Mask y_full = bm.y_set.full();
  std::vector<BudgetPair> pairs;
  for (Mask a : nonempty_subsets(x_full))
    for (Mask b : nonempty_subsets(y_full)) pairs.push_back({a, b});
  std::stable_sort(pairs.begin(), pairs.end(), [](BudgetPair l, BudgetPair r) {
    return set_size(l.first) + set_size(l.second) > set_size(r.first) + set_size(r.second);
  });
  nlohmann::json entries = nlohmann::json::array();
  for (auto [a, b] : pairs)
    for (int x : elements_of(a))
      for (int y : elements_of(b)) {
        const Rational& q = bm.at(a, b, x, y);
        if (q == 0) continue;
        entries.push_back({{"x", bm.x_set.label(x)},
                           {"y", bm.y_set.label(y)},
                           {"A", bm.x_set.labels_of(a)},
                           {"B", bm.y_set.labels_of(b)},
                           {"q", format_rational(q)}});
      }
  return entries;
}

inline nlohmann::json bm_to_json(const SingleAgentBM& bm) {
  Mask full = bm.ground.full();
  auto subsets = nonempty_subsets(full);
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](Mask l, Mask r) { return set_size(l) > set_size(r); });
  nlohmann::json entries = nlohmann::json::array();
  for (Mask a : subsets)
    for (int x : elements_of(a)) {
      const Rational& q = bm.at(a, x);
      if (q == 0) continue;
      entries.push_back(
          {{"x", bm.ground.label(x)}, {"A", bm.ground.labels_of(a)}, {"q", format_rational(q)}});
    }
  return entries;
}

}  // namespace jointchoice
