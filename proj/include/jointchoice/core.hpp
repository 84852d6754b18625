#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jointchoice/rational.hpp"
#include "jointchoice/sets.hpp"

namespace jointchoice {

// ---------------------------------------------------------------------------
// Alternative sets and budgets

// A finite ground set of alternatives. List position is the canonical
// index and doubles as the tie-breaking order for every deterministic
// "choose some" step downstream.
class AlternativeSet {
 public:
  AlternativeSet() = default;

  explicit AlternativeSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw FormatError("alternative set must be non-empty");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i].empty()) throw FormatError("alternative labels must be non-empty");
      for (std::size_t j = i + 1; j < labels_.size(); ++j)
        if (labels_[i] == labels_[j])
          throw FormatError("duplicate alternative label '" + labels_[i] + "'");
    }
    if (labels_.size() > 16) throw FormatError("alternative sets above 16 elements are not supported");
  }

  int size() const { return static_cast<int>(labels_.size()); }
  Mask full() const { return full_mask(size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_.at(i); }

  int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == label) return static_cast<int>(i);
    throw FormatError("unknown alternative '" + label + "'");
  }

  Mask mask_of(const std::vector<std::string>& labels) const {
    Mask m = 0;
    for (const auto& l : labels) {
      int i = index_of(l);
      if (contains(m, i)) throw FormatError("duplicate alternative '" + l + "' in set");
      m = with(m, i);
    }
    return m;
  }

  std::vector<std::string> labels_of(Mask m) const {
    std::vector<std::string> out;
    for (int i : elements_of(m)) out.push_back(label(i));
    return out;
  }

  std::string describe(Mask m) const {
    std::string s = "{";
    bool first = true;
    for (int i : elements_of(m)) {
      if (!first) s += ",";
      s += label(i);
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(const AlternativeSet& a, const AlternativeSet& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
};

// A non-empty menu within a ground set.
struct Budget {
  Mask members = 0;

  Budget() = default;
  Budget(Mask m, const AlternativeSet& ground) : members(m) {
    if (m == 0) throw FormatError("budget must be non-empty");
    if (!subset_of(m, ground.full())) throw FormatError("budget not contained in ground set");
  }
};

// ---------------------------------------------------------------------------
// Linear orders

// A strict total order on a ground set, encoded as the ranking permutation,
// best first. Completeness, transitivity and antisymmetry come for free
// from the permutation encoding.
class LinearOrder {
 public:
  LinearOrder() = default;

  LinearOrder(std::vector<int> ranking, int ground_size) : ranking_(std::move(ranking)) {
    if (static_cast<int>(ranking_.size()) != ground_size)
      throw FormatError("ranking must list every alternative exactly once");
    std::vector<bool> seen(ground_size, false);
    for (int i : ranking_) {
      if (i < 0 || i >= ground_size || seen[i])
        throw FormatError("ranking is not a permutation of the ground set");
      seen[i] = true;
    }
    position_.assign(ground_size, 0);
    for (int p = 0; p < ground_size; ++p) position_[ranking_[p]] = p;
  }

  int size() const { return static_cast<int>(ranking_.size()); }
  const std::vector<int>& ranking() const { return ranking_; }
  int at_rank(int p) const { return ranking_.at(p); }
  int rank_of(int alternative) const { return position_.at(alternative); }
  bool prefers(int a, int b) const { return position_.at(a) < position_.at(b); }

  friend bool operator==(const LinearOrder& a, const LinearOrder& b) {
    return a.ranking_ == b.ranking_;
  }
  friend auto operator<=>(const LinearOrder& a, const LinearOrder& b) {
    return a.ranking_ <=> b.ranking_;
  }

 private:
  std::vector<int> ranking_;
  std::vector<int> position_;
};

// The unique maximal element of `menu` according to `order`.
inline int maximal(const LinearOrder& order, Mask menu) {
  if (menu == 0) throw PreconditionError("maximal of an empty menu");
  for (int i : order.ranking())
    if (contains(menu, i)) return i;
  throw PreconditionError("menu not contained in the order's ground set");
}

struct OrderPair {
  LinearOrder first;   // over X
  LinearOrder second;  // over Y

  friend bool operator==(const OrderPair&, const OrderPair&) = default;
  friend auto operator<=>(const OrderPair& a, const OrderPair& b) {
    if (auto c = a.first <=> b.first; c != 0) return c;
    return a.second <=> b.second;
  }
};

// All |ground|! linear orders, in lexicographic ranking order. Canonical
// enumeration order for order-indexed LP variables and measures.
inline std::vector<LinearOrder> all_orders(int ground_size) {
  std::vector<int> perm(ground_size);
  for (int i = 0; i < ground_size; ++i) perm[i] = i;
  std::vector<LinearOrder> out;
  do {
    out.emplace_back(perm, ground_size);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Choice functions

// One agent's deterministic selections, possibly restricted to a listed
// collection of budgets.
struct ChoiceFunction {
  std::map<Mask, int> picks;  // budget -> chosen index

  int pick(Mask budget) const {
    auto it = picks.find(budget);
    if (it == picks.end()) throw PreconditionError("choice function undefined on a queried budget");
    return it->second;
  }

  friend bool operator==(const ChoiceFunction&, const ChoiceFunction&) = default;
  friend auto operator<=>(const ChoiceFunction&, const ChoiceFunction&) = default;
};

struct ChoiceFunctionPair {
  ChoiceFunction first;   // over X budgets
  ChoiceFunction second;  // over Y budgets

  friend bool operator==(const ChoiceFunctionPair&, const ChoiceFunctionPair&) = default;
  friend auto operator<=>(const ChoiceFunctionPair&, const ChoiceFunctionPair&) = default;
};

inline void validate_choice_function(const ChoiceFunction& c, const AlternativeSet& ground) {
  for (const auto& [budget, pick] : c.picks) {
    Budget b(budget, ground);
    if (!contains(budget, pick))
      throw FormatError("choice function picks an alternative outside its budget");
  }
}

// ---------------------------------------------------------------------------
// Measures

// A finitely supported signed weight function summing to exactly 1.
// Probability measures are the nonnegative special case.
template <typename Key>
class SignedMeasure {
 public:
  SignedMeasure() = default;

  explicit SignedMeasure(std::map<Key, Rational> weights) : weights_(std::move(weights)) {
    for (auto it = weights_.begin(); it != weights_.end();) {
      if (it->second == 0)
        it = weights_.erase(it);
      else
        ++it;
    }
    Rational total = 0;
    for (const auto& [k, w] : weights_) total += w;
    if (total != 1) throw FormatError("measure weights must sum to exactly 1");
  }

  const std::map<Key, Rational>& weights() const { return weights_; }

  bool nonnegative() const {
    for (const auto& [k, w] : weights_)
      if (w < 0) return false;
    return true;
  }

  friend bool operator==(const SignedMeasure&, const SignedMeasure&) = default;

 private:
  std::map<Key, Rational> weights_;
};

using SignedOrderMeasure = SignedMeasure<LinearOrder>;
using SignedPairMeasure = SignedMeasure<OrderPair>;
using SignedChoicePairMeasure = SignedMeasure<ChoiceFunctionPair>;

// ---------------------------------------------------------------------------
// Random joint choice rules

using Cell = std::pair<int, int>;                 // (x index, y index)
using ProbabilityTable = std::map<Cell, Rational>;  // nonzero cells only
using BudgetPair = std::pair<Mask, Mask>;          // (A, B)

// The central data object: for each stored budget pair (A,B), an exact
// probability table over A x B. `complete` means every non-empty pair of
// budgets is present; partial rules carry only a listed collection.
class JointChoiceRule {
 public:
  JointChoiceRule() = default;

  JointChoiceRule(AlternativeSet x_set, AlternativeSet y_set,
                  std::map<BudgetPair, ProbabilityTable> tables, bool complete)
      : x_set_(std::move(x_set)), y_set_(std::move(y_set)), tables_(std::move(tables)), complete_(complete) {
    for (auto& [budgets, table] : tables_) {
      auto [a, b] = budgets;
      if (a == 0 || !subset_of(a, x_set_.full())) throw FormatError("bad X budget in table");
      if (b == 0 || !subset_of(b, y_set_.full())) throw FormatError("bad Y budget in table");
      Rational total = 0;
      for (auto it = table.begin(); it != table.end();) {
        auto [x, y] = it->first;
        if (!contains(a, x) || !contains(b, y))
          throw FormatError("probability assigned to a pair outside " + x_set_.describe(a) + "x" +
                            y_set_.describe(b));
        if (it->second < 0) throw FormatError("negative probability in table");
        total += it->second;
        if (it->second == 0)
          it = table.erase(it);
        else
          ++it;
      }
      if (total != 1)
        throw FormatError("table for " + x_set_.describe(a) + "x" + y_set_.describe(b) +
                          " does not sum to 1");
    }
    if (complete_) {
      std::size_t expected =
          (std::size_t(1) << x_set_.size()) - 1;
      expected *= (std::size_t(1) << y_set_.size()) - 1;
      if (tables_.size() != expected)
        throw FormatError("rule marked complete but some budget pairs are missing");
    }
  }

  const AlternativeSet& x_set() const { return x_set_; }
  const AlternativeSet& y_set() const { return y_set_; }
  bool complete() const { return complete_; }
  const std::map<BudgetPair, ProbabilityTable>& tables() const { return tables_; }

  bool has_table(Mask a, Mask b) const { return tables_.count({a, b}) != 0; }

  const ProbabilityTable& table(Mask a, Mask b) const {
    auto it = tables_.find({a, b});
    if (it == tables_.end())
      throw PreconditionError("rule has no table for " + x_set_.describe(a) + "x" + y_set_.describe(b));
    return it->second;
  }

  Rational probability(int x, int y, Mask a, Mask b) const {
    const auto& t = table(a, b);
    auto it = t.find({x, y});
    return it == t.end() ? Rational(0) : it->second;
  }

  friend bool operator==(const JointChoiceRule& lhs, const JointChoiceRule& rhs) {
    return lhs.x_set_ == rhs.x_set_ && lhs.y_set_ == rhs.y_set_ && lhs.complete_ == rhs.complete_ &&
           lhs.tables_ == rhs.tables_;
  }

 private:
  AlternativeSet x_set_;
  AlternativeSet y_set_;
  std::map<BudgetPair, ProbabilityTable> tables_;
  bool complete_ = false;
};

// A complete single-agent random choice rule: one distribution per menu.
class RandomChoiceRule {
 public:
  RandomChoiceRule() = default;

  RandomChoiceRule(AlternativeSet ground, std::map<std::pair<Mask, int>, Rational> values)
      : ground_(std::move(ground)) {
    values_.assign((std::size_t(1) << ground_.size()) * ground_.size(), Rational(0));
    for (const auto& [key, v] : values) {
      auto [menu, x] = key;
      if (menu == 0 || !subset_of(menu, ground_.full()) || !contains(menu, x))
        throw FormatError("probability assigned outside a menu");
      if (v < 0) throw FormatError("negative probability in single-agent rule");
      at(menu, x) = v;
    }
    for (Mask menu : nonempty_subsets(ground_.full())) {
      Rational total = 0;
      for (int x : elements_of(menu)) total += at(menu, x);
      if (total != 1)
        throw FormatError("menu " + ground_.describe(menu) + " does not sum to 1");
    }
  }

  const AlternativeSet& ground() const { return ground_; }

  const Rational& probability(int x, Mask menu) const {
    return values_.at(std::size_t(menu) * ground_.size() + x);
  }

  friend bool operator==(const RandomChoiceRule&, const RandomChoiceRule&) = default;

 private:
  Rational& at(Mask menu, int x) { return values_[std::size_t(menu) * ground_.size() + x]; }

  AlternativeSet ground_;
  std::vector<Rational> values_;
};

// ---------------------------------------------------------------------------
// Rule induction

inline std::vector<BudgetPair> all_budget_pairs(const AlternativeSet& x_set, const AlternativeSet& y_set) {
  std::vector<BudgetPair> out;
  for (Mask a : nonempty_subsets(x_set.full()))
    for (Mask b : nonempty_subsets(y_set.full())) out.push_back({a, b});
  return out;
}

// p(x,y|A,B) = sum of weights over order pairs whose maxima on (A,B) hit
// (x,y). A signed measure may induce negative cells; there is no probability
// rule in that case and the validated construction throws. Callers that want
// the raw signed cells (for their own nonnegativity test) use
// induce_cells_from_order_pairs instead.
inline JointChoiceRule induce_from_order_pairs(const SignedPairMeasure& measure,
                                               const AlternativeSet& x_set, const AlternativeSet& y_set,
                                               const std::vector<BudgetPair>& budgets) {
  std::map<BudgetPair, ProbabilityTable> tables;
  for (auto [a, b] : budgets) {
    ProbabilityTable table;
    for (const auto& [pair, w] : measure.weights()) {
      Cell cell{maximal(pair.first, a), maximal(pair.second, b)};
      table[cell] += w;
    }
    for (auto it = table.begin(); it != table.end();) {
      if (it->second == 0) {
        it = table.erase(it);
        continue;
      }
      if (it->second < 0)
        throw PreconditionError("signed measure induces a negative cell at " + x_set.describe(a) + "x" +
                                y_set.describe(b));
      ++it;
    }
    tables[{a, b}] = std::move(table);
  }
  bool complete = tables.size() == all_budget_pairs(x_set, y_set).size();
  return JointChoiceRule(x_set, y_set, std::move(tables), complete);
}

inline JointChoiceRule induce_from_order_pairs(const SignedPairMeasure& measure,
                                               const AlternativeSet& x_set, const AlternativeSet& y_set) {
  return induce_from_order_pairs(measure, x_set, y_set, all_budget_pairs(x_set, y_set));
}

// Signed induction that reports the raw cell values without constructing a
// validated rule. Used by verification code that compares cellwise.
inline std::map<BudgetPair, ProbabilityTable> induce_cells_from_order_pairs(
    const SignedPairMeasure& measure, const std::vector<BudgetPair>& budgets) {
  std::map<BudgetPair, ProbabilityTable> tables;
  for (auto [a, b] : budgets) {
    ProbabilityTable table;
    for (const auto& [pair, w] : measure.weights()) {
      Cell cell{maximal(pair.first, a), maximal(pair.second, b)};
      table[cell] += w;
    }
    for (auto it = table.begin(); it != table.end();)
      it = it->second == 0 ? table.erase(it) : std::next(it);
    tables[{a, b}] = std::move(table);
  }
  return tables;
}

inline JointChoiceRule induce_from_choice_pairs(const SignedChoicePairMeasure& measure,
                                                const AlternativeSet& x_set, const AlternativeSet& y_set,
                                                const std::vector<BudgetPair>& budgets) {
  std::map<BudgetPair, ProbabilityTable> tables;
  for (auto [a, b] : budgets) {
    ProbabilityTable table;
    for (const auto& [pair, w] : measure.weights()) {
      Cell cell{pair.first.pick(a), pair.second.pick(b)};
      table[cell] += w;
    }
    for (auto it = table.begin(); it != table.end();) {
      if (it->second == 0) {
        it = table.erase(it);
        continue;
      }
      if (it->second < 0)
        throw PreconditionError("signed measure induces a negative cell");
      ++it;
    }
    tables[{a, b}] = std::move(table);
  }
  bool complete = tables.size() == all_budget_pairs(x_set, y_set).size();
  return JointChoiceRule(x_set, y_set, std::move(tables), complete);
}

inline std::map<BudgetPair, ProbabilityTable> induce_cells_from_choice_pairs(
    const SignedChoicePairMeasure& measure, const std::vector<BudgetPair>& budgets) {
  std::map<BudgetPair, ProbabilityTable> tables;
  for (auto [a, b] : budgets) {
    ProbabilityTable table;
    for (const auto& [pair, w] : measure.weights()) {
      Cell cell{pair.first.pick(a), pair.second.pick(b)};
      table[cell] += w;
    }
    for (auto it = table.begin(); it != table.end();)
      it = it->second == 0 ? table.erase(it) : std::next(it);
    tables[{a, b}] = std::move(table);
  }
  return tables;
}

// Single-agent induction: p(x,A) = measure of orders whose maximum on A is x.
inline RandomChoiceRule induce_from_orders(const SignedOrderMeasure& measure, const AlternativeSet& ground) {
  std::map<std::pair<Mask, int>, Rational> values;
  for (Mask menu : nonempty_subsets(ground.full()))
    for (const auto& [order, w] : measure.weights()) values[{menu, maximal(order, menu)}] += w;
  return RandomChoiceRule(ground, std::move(values));
}

inline std::map<std::pair<Mask, int>, Rational> induce_cells_from_orders(const SignedOrderMeasure& measure,
                                                                         const AlternativeSet& ground) {
  std::map<std::pair<Mask, int>, Rational> values;
  for (Mask menu : nonempty_subsets(ground.full()))
    for (const auto& [order, w] : measure.weights()) {
      auto key = std::make_pair(menu, maximal(order, menu));
      values[key] += w;
      if (values[key] == 0) values.erase(key);
    }
  return values;
}

// ---------------------------------------------------------------------------
// Marginal random choice rules

// Boolean form of the marginality axiom: every row sum of agent 1 matches
// its (A,Y) reference and every column sum of agent 2 matches its (X,B)
// reference. The diagnostics form with witnesses is check_marginality.
inline bool marginality_holds(const JointChoiceRule& rule) {
  if (!rule.complete()) throw PreconditionError("marginality requires a complete rule");
  Mask x_full = rule.x_set().full();
  Mask y_full = rule.y_set().full();
  for (Mask a : nonempty_subsets(x_full)) {
    std::map<int, Rational> reference;
    for (const auto& [cell, v] : rule.table(a, y_full)) reference[cell.first] += v;
    for (Mask b : nonempty_subsets(y_full)) {
      if (b == y_full) continue;
      std::map<int, Rational> sums;
      for (const auto& [cell, v] : rule.table(a, b)) sums[cell.first] += v;
      for (int x : elements_of(a))
        if ((sums.count(x) ? sums[x] : Rational(0)) != (reference.count(x) ? reference[x] : Rational(0)))
          return false;
    }
  }
  for (Mask b : nonempty_subsets(y_full)) {
    std::map<int, Rational> reference;
    for (const auto& [cell, v] : rule.table(x_full, b)) reference[cell.second] += v;
    for (Mask a : nonempty_subsets(x_full)) {
      if (a == x_full) continue;
      std::map<int, Rational> sums;
      for (const auto& [cell, v] : rule.table(a, b)) sums[cell.second] += v;
      for (int y : elements_of(b))
        if ((sums.count(y) ? sums[y] : Rational(0)) != (reference.count(y) ? reference[y] : Rational(0)))
          return false;
    }
  }
  return true;
}

// p1(x,A) = sum_y p(x,y|A,Y) and p2(y,B) = sum_x p(x,y|X,B), well defined
// when marginality holds. Callers may bypass the check for diagnostics, in
// which case the marginals are read off the full opposite budget exactly as
// the definition is written.
inline std::pair<RandomChoiceRule, RandomChoiceRule> marginal_rules(const JointChoiceRule& rule,
                                                                    bool check = true) {
  Mask x_full = rule.x_set().full();
  Mask y_full = rule.y_set().full();
  for (Mask a : nonempty_subsets(x_full))
    if (!rule.has_table(a, y_full))
      throw PreconditionError("partial rule is missing table " + rule.x_set().describe(a) + "x" +
                              rule.y_set().describe(y_full));
  for (Mask b : nonempty_subsets(y_full))
    if (!rule.has_table(x_full, b))
      throw PreconditionError("partial rule is missing table " + rule.x_set().describe(x_full) + "x" +
                              rule.y_set().describe(b));
  if (check && !marginality_holds(rule))
    throw PreconditionError("rule violates marginality; marginal rules are not well defined");

  std::map<std::pair<Mask, int>, Rational> p1;
  for (Mask a : nonempty_subsets(x_full))
    for (const auto& [cell, v] : rule.table(a, y_full)) p1[{a, cell.first}] += v;
  std::map<std::pair<Mask, int>, Rational> p2;
  for (Mask b : nonempty_subsets(y_full))
    for (const auto& [cell, v] : rule.table(x_full, b)) p2[{b, cell.second}] += v;
  return {RandomChoiceRule(rule.x_set(), std::move(p1)), RandomChoiceRule(rule.y_set(), std::move(p2))};
}

}  // namespace jointchoice
