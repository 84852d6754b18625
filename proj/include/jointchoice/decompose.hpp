#pragma once

// The three constructive decompositions: signed flow stripping of a single
// lattice graph, signed decomposition of a joint rule into order pairs, and
// recovery of a separable random utility representation when one marginal
// is uniquely rationalizable.

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "jointchoice/graphs.hpp"

namespace jointchoice {

// ---------------------------------------------------------------------------
// Tracing

struct TraceEvent {
  std::string kind;     // "strip-negative" | "strip-positive" | "conditional" | "assign-path"
  std::string context;  // which conditional graph / recovery step
  std::string edge;     // rendered lattice edge, when applicable
  std::string order;    // rendered order, when applicable
  Rational amount;
  int negatives_remaining = 0;
};

using TraceSink = std::function<void(const TraceEvent&)>;

inline std::string render_order(const LinearOrder& order, const AlternativeSet& ground) {
  std::string s;
  for (std::size_t i = 0; i < order.ranking().size(); ++i) {
    if (i) s += ">";
    s += ground.label(order.ranking()[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Flow stripping

enum class StripPhase { kNegative, kPositive };

struct PathFlowStep {
  LinearOrder order;
  Rational amount;  // negative in the negative-stripping phase
  StripPhase phase;
};

struct StripResult {
  std::map<LinearOrder, Rational> weights;  // combined g + h, zeros pruned
  std::vector<PathFlowStep> steps;
  int negative_steps = 0;
  int positive_steps = 0;
};

namespace detail {

inline int count_negative_edges(const LatticeFlowGraph& g) {
  int count = 0;
  for (Mask a : nonempty_subsets(g.ground.full()))
    for (int x : elements_of(a))
      if (g.at(a, x) < 0) ++count;
  return count;
}

// Canonical edge scan order: menu size ascending, then mask, then element.
template <typename Pred>
inline std::optional<std::pair<Mask, int>> scan_edges(const LatticeFlowGraph& g, Pred&& pred) {
  std::optional<std::pair<Mask, int>> best;
  auto subsets = nonempty_subsets(g.ground.full());
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](Mask l, Mask r) { return set_size(l) < set_size(r); });
  for (Mask a : subsets)
    for (int x : elements_of(a))
      if (pred(a, x, best)) best = {a, x};
  return best;
}

inline void subtract_along(LatticeFlowGraph& g, const LinearOrder& order, const Rational& amount) {
  Mask current = g.ground.full();
  for (int x : order.ranking()) {
    g.at(current, x) -= amount;
    current = without(current, x);
  }
}

inline Rational min_capacity_along(const LatticeFlowGraph& g, const LinearOrder& order) {
  Mask current = g.ground.full();
  std::optional<Rational> best;
  for (int x : order.ranking()) {
    if (!best || g.at(current, x) < *best) best = g.at(current, x);
    current = without(current, x);
  }
  return *best;
}

inline std::string render_edge(const LatticeFlowGraph& g, Mask a, int x) {
  return "(" + g.ground.label(x) + "," + g.ground.describe(a) + ")";
}

// Strips nonnegative, flow-conserving capacities down to zero, one positive
// maximal chain at a time. Each pass saturates the minimum edge along the
// canonically smallest positive chain through the canonically first positive
// edge, so it runs at most once per edge.
inline void strip_positive_phase(LatticeFlowGraph& g, StripResult& result, const TraceSink& sink,
                                 const std::string& context) {
  int n = g.ground.size();
  Mask full = g.ground.full();
  while (true) {
    auto seed = scan_edges(g, [&](Mask a, int x, const std::optional<std::pair<Mask, int>>& best) {
      return !best && g.at(a, x) > 0;
    });
    if (!seed) break;
    auto [seed_set, seed_x] = *seed;

    // climb to the ground set along positive in-edges
    std::vector<int> above;  // additions, in order
    Mask current = seed_set;
    while (current != full) {
      std::optional<int> z;
      for (int cand : elements_of(full & ~current)) {
        if (g.at(with(current, cand), cand) > 0) {
          z = cand;
          break;
        }
      }
      if (!z) throw InternalError("positive edge cannot be traced to the ground set");
      above.push_back(*z);
      current = with(current, *z);
    }
    // descend to the empty set along positive out-edges
    std::vector<int> below;
    current = without(seed_set, seed_x);
    while (current != 0) {
      std::optional<int> w;
      for (int cand : elements_of(current)) {
        if (g.at(current, cand) > 0) {
          w = cand;
          break;
        }
      }
      if (!w) throw InternalError("positive edge cannot be traced to the empty set");
      below.push_back(*w);
      current = without(current, *w);
    }

    std::vector<int> removal(above.rbegin(), above.rend());
    removal.push_back(seed_x);
    removal.insert(removal.end(), below.begin(), below.end());
    LinearOrder order(std::move(removal), n);

    Rational r = min_capacity_along(g, order);
    subtract_along(g, order, r);
    result.weights[order] += r;
    if (result.weights[order] == 0) result.weights.erase(order);
    result.steps.push_back({order, r, StripPhase::kPositive});
    ++result.positive_steps;
    if (sink)
      sink({"strip-positive", context, render_edge(g, seed_set, seed_x), render_order(order, g.ground), r,
            count_negative_edges(g)});
  }
}

}  // namespace detail

// Writes the graph's capacities as signed path flows: the returned weight
// function loads each edge (x,A) with exactly its original capacity. Phase
// one repeatedly zeroes the most negative edge through a canonical chain
// (never making any edge more negative), phase two saturates positive
// chains; phase one runs at most once per negative edge and phase two at
// most once per edge.
inline StripResult strip_signed_flow(LatticeFlowGraph graph, const TraceSink& sink = nullptr,
                                     const std::string& context = "") {
  auto conservation = flow_conservation(graph);
  if (!conservation.pass)
    throw PreconditionError("flow stripping requires inflow = outflow at interior nodes: " +
                            conservation.witnesses.front().describe());

  StripResult result;
  int n = graph.ground.size();
  Mask full = graph.ground.full();

  while (true) {
    auto worst = detail::scan_edges(graph, [&](Mask a, int x, const std::optional<std::pair<Mask, int>>& best) {
      if (graph.at(a, x) >= 0) return false;
      return !best || graph.at(a, x) < graph.at(best->first, best->second);
    });
    if (!worst) break;
    auto [set, x] = *worst;
    Rational r = graph.at(set, x);

    // canonical chain through the edge: ascending elements above and below
    std::vector<int> removal = elements_of(full & ~set);
    removal.push_back(x);
    for (int w : elements_of(without(set, x))) removal.push_back(w);
    LinearOrder order(std::move(removal), n);

    detail::subtract_along(graph, order, r);
    result.weights[order] += r;
    if (result.weights[order] == 0) result.weights.erase(order);
    result.steps.push_back({order, r, StripPhase::kNegative});
    ++result.negative_steps;
    if (sink)
      sink({"strip-negative", context, detail::render_edge(graph, set, x), render_order(order, graph.ground),
            r, detail::count_negative_edges(graph)});
  }

  detail::strip_positive_phase(graph, result, sink, context);
  if (!graph.all_zero()) throw InternalError("flow stripping terminated with nonzero residual");
  return result;
}

// Phase two alone, for graphs already known nonnegative.
inline StripResult strip_nonnegative_flow(LatticeFlowGraph graph, const TraceSink& sink = nullptr,
                                          const std::string& context = "") {
  for (Mask a : nonempty_subsets(graph.ground.full()))
    for (int x : elements_of(a))
      if (graph.at(a, x) < 0)
        throw PreconditionError("nonnegative stripping given a negative capacity at " +
                                detail::render_edge(graph, a, x));
  auto conservation = flow_conservation(graph);
  if (!conservation.pass)
    throw PreconditionError("flow stripping requires inflow = outflow at interior nodes: " +
                            conservation.witnesses.front().describe());
  StripResult result;
  detail::strip_positive_phase(graph, result, sink, context);
  if (!graph.all_zero()) throw InternalError("flow stripping terminated with nonzero residual");
  return result;
}

// ---------------------------------------------------------------------------
// Single-agent signed decomposition

// Every complete single-agent random choice rule is induced by some signed
// order measure; this builds one by stripping the rule's polynomial graph.
inline SignedOrderMeasure decompose_into_orders(const RandomChoiceRule& rule, const TraceSink& sink = nullptr) {
  LatticeFlowGraph graph(bm_single(rule));
  auto strip = strip_signed_flow(std::move(graph), sink, "single-agent");
  return SignedOrderMeasure(std::move(strip.weights));
}

// ---------------------------------------------------------------------------
// Signed decomposition of a joint rule

struct DecomposeOptions {
  TraceSink sink;
  // Re-checks recursivity of the residual polynomial table after every
  // conditional-graph subtraction. Quadratic blowup; test harness use only.
  bool check_invariants = false;
  // supported-path enumeration cap for recovery
  std::size_t path_cap = kDefaultSupportedPathCap;
};

namespace detail {

inline void assert_recursive_residual(const BlockMarschakTable& residual) {
  auto report = check_recursivity(residual);
  if (!report.pass)
    throw InternalError("decomposition residual lost recursivity: " +
                        report.witnesses.front().describe());
}

}  // namespace detail

// Decomposes a marginality-satisfying complete rule into a signed measure
// over order pairs that induces it exactly. Works up the lead lattice one
// menu size at a time: strip each conditional graph, attach the stripped
// weights to the canonical lead order ranking the processed pair on top of
// its class, and subtract the attached mass from every polynomial it loads.
inline SignedPairMeasure decompose_into_order_pairs(const JointChoiceRule& rule,
                                            const DecomposeOptions& options = {}) {
  auto marginality = check_marginality(rule);
  if (!marginality.pass)
    throw PreconditionError("decomposition requires marginality: " +
                            marginality.witnesses.front().describe());

  BlockMarschakTable residual = bm_joint(rule);
  const AlternativeSet& x_set = residual.x_set;
  const AlternativeSet& y_set = residual.y_set;
  int nx = x_set.size();
  Mask x_full = x_set.full();
  Mask y_full = y_set.full();

  std::vector<int> stages;
  if (nx == 1)
    stages = {1};
  else if (nx == 2)
    stages = {2};
  else
    for (int j = 2; j <= nx - 1; ++j) stages.push_back(j);

  std::map<OrderPair, Rational> weights;
  for (int j : stages) {
    for (Mask a : nonempty_subsets(x_full)) {
      if (set_size(a) != j) continue;
      for (int x : elements_of(a)) {
        LatticeFlowGraph conditional(y_set);
        for (Mask b : nonempty_subsets(y_full))
          for (int y : elements_of(b)) conditional.at(b, y) = residual.at(a, b, x, y);
        if (conditional.all_zero()) continue;

        std::string context = "(" + x_set.label(x) + "," + x_set.describe(a) + ")";
        if (options.sink) options.sink({"conditional", context, "", "", Rational(0), 0});
        auto strip = strip_signed_flow(conditional, options.sink, context);

        // canonical lead order: everything outside A on top in ascending
        // label order, then x, then the class set D = A\{x} ascending
        std::vector<int> ranking = elements_of(x_full & ~a);
        ranking.push_back(x);
        for (int d : elements_of(without(a, x))) ranking.push_back(d);
        LinearOrder lead(std::move(ranking), nx);
        LatticePath lead_path = order_to_path(lead);

        for (const auto& [follower, w] : strip.weights) {
          weights[{lead, follower}] += w;
          LatticePath follower_path = order_to_path(follower);
          for (int i = 0; i < nx; ++i) {
            Mask c = lead_path.sets[i];
            int wx = lead.ranking()[i];
            for (int m = 0; m < y_set.size(); ++m)
              residual.at(c, follower_path.sets[m], wx, follower.ranking()[m]) -= w;
          }
        }
        for (Mask b : nonempty_subsets(y_full))
          for (int y : elements_of(b))
            if (residual.at(a, b, x, y) != 0)
              throw InternalError("conditional graph not cleared at " + context);
        if (options.check_invariants) detail::assert_recursive_residual(residual);
      }
    }
  }

  for (Mask a : nonempty_subsets(x_full))
    for (Mask b : nonempty_subsets(y_full))
      for (int x : elements_of(a))
        for (int y : elements_of(b))
          if (residual.at(a, b, x, y) != 0)
            throw InternalError("decomposition terminated with a nonzero polynomial at (" +
                                x_set.label(x) + "," + y_set.label(y) + "|" + x_set.describe(a) + "," +
                                y_set.describe(b) + ")");
  return SignedPairMeasure(std::move(weights));
}

// ---------------------------------------------------------------------------
// Separable random utility recovery

// Recovers a probability measure over order pairs from a rule satisfying
// marginality and non-negativity whose lead marginal is uniquely
// rationalizable. lead_agent 0 means auto: try agent 1, then agent 2.
inline SignedPairMeasure recover_random_utility(const JointChoiceRule& rule, int lead_agent = 0,
                                          const DecomposeOptions& options = {}) {
  auto marginality = check_marginality(rule);
  if (!marginality.pass)
    throw PreconditionError("recovery requires marginality: " + marginality.witnesses.front().describe());

  BlockMarschakTable bm = bm_table(rule);
  auto nonnegativity = check_nonnegativity(bm);
  if (!nonnegativity.pass)
    throw PreconditionError("recovery requires non-negativity: " +
                            nonnegativity.witnesses.front().describe());

  std::vector<int> candidates = lead_agent == 0 ? std::vector<int>{1, 2} : std::vector<int>{lead_agent};
  int lead = 0;
  UniqueRumResult uniqueness;
  for (int candidate : candidates) {
    auto result = unique_rum_check(candidate == 1 ? *bm.marginal1 : *bm.marginal2, options.path_cap);
    if (result.unique) {
      lead = candidate;
      uniqueness = std::move(result);
      break;
    }
  }
  if (lead == 0)
    throw PreconditionError(lead_agent == 0
                                ? "neither marginal uniquely rationalizable: recovery inapplicable"
                                : "lead marginal not uniquely rationalizable: recovery inapplicable");

  MarginalGraphSystem system = build_system(bm, lead);
  const AlternativeSet& lead_set = system.marginal.ground;
  const AlternativeSet& follow_set = lead == 1 ? bm.y_set : bm.x_set;
  int n = lead_set.size();
  Mask follow_full = follow_set.full();

  LatticeFlowGraph marginal = system.marginal;
  std::map<std::pair<Mask, int>, LatticeFlowGraph> conditionals = system.conditionals;

  std::map<OrderPair, Rational> weights;
  for (const auto& certificate : uniqueness.certificates) {
    LatticePath path = order_to_path(certificate.order);
    Mask a_i = path.sets[certificate.edge_position];
    int x_i = certificate.order.ranking()[certificate.edge_position];

    Rational amount = marginal.at(a_i, x_i);
    LatticeFlowGraph snapshot = conditionals.at({a_i, x_i});
    if (options.sink)
      options.sink({"assign-path", "lead " + std::to_string(lead),
                    detail::render_edge(marginal, a_i, x_i), render_order(certificate.order, lead_set),
                    amount, 0});

    auto strip = strip_nonnegative_flow(snapshot, options.sink,
                                        "(" + lead_set.label(x_i) + "," + lead_set.describe(a_i) + ")");
    Rational stripped_total = 0;
    for (const auto& [follower, w] : strip.weights) {
      if (w < 0) throw InternalError("nonnegative stripping produced a negative weight");
      stripped_total += w;
      OrderPair pair = lead == 1 ? OrderPair{certificate.order, follower}
                                 : OrderPair{follower, certificate.order};
      weights[pair] += w;
    }
    if (stripped_total != amount)
      throw InternalError("conditional flow does not match the marginal edge flow");

    for (int i = 0; i < n; ++i) {
      Mask c = path.sets[i];
      int wx = certificate.order.ranking()[i];
      LatticeFlowGraph& target = conditionals.at({c, wx});
      for (Mask b : nonempty_subsets(follow_full))
        for (int y : elements_of(b)) {
          target.at(b, y) -= snapshot.at(b, y);
          if (target.at(b, y) < 0)
            throw InternalError("recovery drove a conditional capacity negative");
        }
      marginal.at(c, wx) -= amount;
      if (marginal.at(c, wx) < 0) throw InternalError("recovery drove a marginal capacity negative");
    }
  }

  if (!marginal.all_zero()) throw InternalError("recovery terminated with positive marginal flow");
  for (const auto& [key, graph] : conditionals)
    if (!graph.all_zero()) throw InternalError("recovery terminated with positive conditional flow");

  SignedPairMeasure measure(std::move(weights));
  if (!measure.nonnegative()) throw InternalError("recovered measure has a negative weight");
  return measure;
}

}  // namespace jointchoice
