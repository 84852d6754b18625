#pragma once

// Lattice flow graphs over the subset lattice: the marginal graph system,
// the path-order bijection, supported paths, branching relations, and the
// unique-representation criterion driving measure recovery.

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "jointchoice/moebius.hpp"

namespace jointchoice {

// Nodes are the subsets of the ground set; there is one edge A -> A\{x}
// per pair x in A. Capacities may be negative: signed flows arise while
// decomposing arbitrary rules.
struct LatticeFlowGraph {
  AlternativeSet ground;
  std::vector<Rational> capacity;

  LatticeFlowGraph() = default;
  explicit LatticeFlowGraph(AlternativeSet g)
      : ground(std::move(g)), capacity((std::size_t(1) << ground.size()) * ground.size()) {}
  explicit LatticeFlowGraph(const SingleAgentBM& bm) : ground(bm.ground), capacity(bm.values) {}

  Rational& at(Mask a, int x) { return capacity[std::size_t(a) * ground.size() + x]; }
  const Rational& at(Mask a, int x) const { return capacity[std::size_t(a) * ground.size() + x]; }

  int edge_count() const {
    int total = 0;
    for (Mask a : nonempty_subsets(ground.full())) total += set_size(a);
    return total;
  }

  bool all_zero() const {
    for (Mask a : nonempty_subsets(ground.full()))
      for (int x : elements_of(a))
        if (at(a, x) != 0) return false;
    return true;
  }
};

// One marginal flow graph for the lead agent plus one conditional graph per
// lead edge (x,A), carrying the follower's polynomials q(x,.|A,.).
struct MarginalGraphSystem {
  int lead_agent = 1;
  LatticeFlowGraph marginal;
  std::map<std::pair<Mask, int>, LatticeFlowGraph> conditionals;  // keyed by lead (A, x)
};

// ---------------------------------------------------------------------------
// Paths and the order bijection

// A maximal chain ground = A_0 > A_1 > ... > A_n = {} dropping one element
// per step. Bijective with linear orders: removal order = ranking best-first.
struct LatticePath {
  std::vector<Mask> sets;

  friend bool operator==(const LatticePath&, const LatticePath&) = default;
};

inline LatticePath order_to_path(const LinearOrder& order) {
  LatticePath path;
  Mask current = full_mask(order.size());
  path.sets.push_back(current);
  for (int i : order.ranking()) {
    current = without(current, i);
    path.sets.push_back(current);
  }
  return path;
}

inline LinearOrder path_to_order(const LatticePath& path) {
  if (path.sets.empty() || path.sets.back() != 0)
    throw FormatError("lattice path must end at the empty set");
  int n = set_size(path.sets.front());
  if (path.sets.front() != full_mask(n) || static_cast<int>(path.sets.size()) != n + 1)
    throw FormatError("lattice path must start at the ground set and drop one element per step");
  std::vector<int> ranking;
  for (int i = 0; i < n; ++i) {
    Mask removed = path.sets[i] & ~path.sets[i + 1];
    if (!subset_of(path.sets[i + 1], path.sets[i]) || set_size(removed) != 1)
      throw FormatError("lattice path must drop exactly one element per step");
    ranking.push_back(lowest_element(removed));
  }
  return LinearOrder(std::move(ranking), n);
}

// ---------------------------------------------------------------------------
// Flow conservation

// Inflow equals outflow at every interior node. Inflow at A: capacities on
// edges from the one-element extensions of A; outflow: capacities q(x,A).
inline AxiomReport flow_conservation(const LatticeFlowGraph& graph) {
  AxiomReport report;
  Mask full = graph.ground.full();
  for (Mask a : nonempty_subsets(full)) {
    if (a == full) continue;
    Rational inflow = 0, outflow = 0;
    for (int z : elements_of(full & ~a)) inflow += graph.at(with(a, z), z);
    for (int x : elements_of(a)) outflow += graph.at(a, x);
    if (inflow != outflow)
      report.add({"flow-conservation", {{"node", graph.ground.describe(a)}}, inflow, outflow});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Supported paths

inline constexpr std::size_t kDefaultSupportedPathCap = 10000;

inline std::size_t count_supported_paths(const LatticeFlowGraph& graph) {
  Mask full = graph.ground.full();
  std::vector<std::size_t> ways(std::size_t(1) << graph.ground.size(), 0);
  ways[0] = 1;
  for (Mask a = 1; a <= full; ++a)
    for (int x : elements_of(a))
      if (graph.at(a, x) > 0) ways[a] += ways[without(a, x)];
  return ways[full];
}

// All maximal chains whose every edge capacity is strictly positive, in
// canonical order (lexicographic on the removal sequence). The count is
// checked against `cap` before anything is materialized.
inline std::vector<LinearOrder> supported_paths(const LatticeFlowGraph& graph,
                                                std::size_t cap = kDefaultSupportedPathCap) {
  Mask full = graph.ground.full();
  for (Mask a : nonempty_subsets(full))
    for (int x : elements_of(a))
      if (graph.at(a, x) < 0)
        throw PreconditionError("supported paths require nonnegative capacities; edge (" +
                                graph.ground.label(x) + "," + graph.ground.describe(a) + ") is " +
                                format_rational(graph.at(a, x)));
  std::size_t count = count_supported_paths(graph);
  if (count > cap)
    throw PreconditionError("supported path count " + std::to_string(count) + " exceeds cap " +
                            std::to_string(cap));

  std::vector<LinearOrder> out;
  std::vector<int> removal;
  auto descend = [&](auto&& self, Mask a) -> void {
    if (a == 0) {
      out.emplace_back(removal, graph.ground.size());
      return;
    }
    for (int x : elements_of(a)) {
      if (graph.at(a, x) <= 0) continue;
      removal.push_back(x);
      self(self, without(a, x));
      removal.pop_back();
    }
  };
  descend(descend, full);
  return out;
}

// ---------------------------------------------------------------------------
// Branching relations

struct BranchingRelation {
  bool branching = false;
  bool in_branching = false;
  bool out_branching = false;
};

// Literal evaluation of the three definitions on indexed set sequences.
// Indices run over interior positions 1..n-1 only, so paths sharing just
// the ground set and the empty set are unrelated in all three senses.
inline BranchingRelation branching_relation(const LatticePath& p1, const LatticePath& p2) {
  if (p1.sets.size() != p2.sets.size() || p1.sets.front() != p2.sets.front())
    throw PreconditionError("branching relations require paths over the same ground set");
  int n = static_cast<int>(p1.sets.size()) - 1;
  BranchingRelation rel;
  for (int i = 1; i <= n - 1; ++i) {
    if (p1.sets[i] == p2.sets[i] && p1.sets[i - 1] != p2.sets[i - 1]) rel.in_branching = true;
    if (p1.sets[i] == p2.sets[i] && p1.sets[i + 1] != p2.sets[i + 1]) rel.out_branching = true;
  }
  for (int i = 1; i <= n - 1 && !rel.branching; ++i) {
    if (p1.sets[i - 1] == p2.sets[i - 1]) continue;
    for (int j = i; j <= n - 1; ++j) {
      bool agree = true;
      for (int m = i; m <= j && agree; ++m) agree = p1.sets[m] == p2.sets[m];
      if (!agree) break;
      if (p1.sets[j + 1] != p2.sets[j + 1]) {
        rel.branching = true;
        break;
      }
    }
  }
  return rel;
}

// ---------------------------------------------------------------------------
// Unique representation criterion

struct PathCertificate {
  LinearOrder order;
  int edge_position = 0;  // edge from path.sets[pos] removing order.ranking()[pos]

  Mask parent_set() const { return order_to_path(order).sets[edge_position]; }
  int removed_element() const { return order.ranking()[edge_position]; }
};

struct UniqueRumResult {
  bool unique = false;
  std::vector<PathCertificate> certificates;        // one per supported path when unique
  std::optional<LinearOrder> path_without_edge;     // a supported path lacking a qualifying edge
};

// A nonnegative, flow-conserving marginal has a unique rationalizing order
// distribution exactly when every supported path owns an edge no other
// supported path uses, with no in-branching above that edge and no
// out-branching below it. When several edges qualify the first along the
// path is recorded.
inline UniqueRumResult unique_rum_check(const LatticeFlowGraph& graph,
                                        std::size_t cap = kDefaultSupportedPathCap) {
  Mask full = graph.ground.full();
  for (Mask a : nonempty_subsets(full))
    for (int x : elements_of(a))
      if (graph.at(a, x) < 0)
        throw PreconditionError("marginal polynomial q(" + graph.ground.label(x) + "," +
                                graph.ground.describe(a) + ") = " + format_rational(graph.at(a, x)) +
                                " is negative: not a random utility marginal");
  auto conservation = flow_conservation(graph);
  if (!conservation.pass)
    throw PreconditionError("marginal polynomials violate flow conservation: " +
                            conservation.witnesses.front().describe());

  auto orders = supported_paths(graph, cap);
  int n = graph.ground.size();
  std::vector<LatticePath> paths;
  paths.reserve(orders.size());
  for (const auto& o : orders) paths.push_back(order_to_path(o));

  // edge -> indices of supported paths using it
  std::map<std::pair<Mask, int>, std::vector<std::size_t>> users;
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (int k = 0; k < n; ++k) users[{paths[i].sets[k], orders[i].ranking()[k]}].push_back(i);

  UniqueRumResult result;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::optional<int> chosen;
    for (int k = 0; k < n && !chosen; ++k) {
      const auto& sharing = users[{paths[i].sets[k], orders[i].ranking()[k]}];
      if (sharing.size() != 1) continue;
      bool ok = true;
      for (std::size_t j = 0; j < paths.size() && ok; ++j) {
        if (j == i) continue;
        // never in-branching above the edge: no merge into this path at a
        // node up to and including the edge's parent
        for (int m = 1; m <= k && ok; ++m)
          if (paths[i].sets[m] == paths[j].sets[m] && paths[i].sets[m - 1] != paths[j].sets[m - 1])
            ok = false;
        // never out-branching below the edge: no split from this path at the
        // edge's child or later
        for (int m = k + 1; m <= n - 1 && ok; ++m)
          if (paths[i].sets[m] == paths[j].sets[m] && paths[i].sets[m + 1] != paths[j].sets[m + 1])
            ok = false;
      }
      if (ok) chosen = k;
    }
    if (!chosen) {
      result.unique = false;
      result.certificates.clear();
      result.path_without_edge = orders[i];
      return result;
    }
    result.certificates.push_back({orders[i], *chosen});
  }
  result.unique = true;
  return result;
}

inline UniqueRumResult unique_rum_check(const SingleAgentBM& marginal_bm,
                                        std::size_t cap = kDefaultSupportedPathCap) {
  return unique_rum_check(LatticeFlowGraph(marginal_bm), cap);
}

// ---------------------------------------------------------------------------
// System construction

// Builds the marginal graph system for the given lead agent. With lead 2 the
// roles of X and Y swap: the marginal graph ranges over Y and conditional
// graphs over X.
inline MarginalGraphSystem build_system(const BlockMarschakTable& bm, int lead_agent) {
  if (lead_agent != 1 && lead_agent != 2) throw PreconditionError("lead agent must be 1 or 2");
  auto recursivity = check_recursivity(bm);
  if (!recursivity.pass)
    throw PreconditionError("marginal graph system is not well defined: rule violates marginality (" +
                            recursivity.witnesses.front().describe() + ")");

  const AlternativeSet& lead_set = lead_agent == 1 ? bm.x_set : bm.y_set;
  const AlternativeSet& follow_set = lead_agent == 1 ? bm.y_set : bm.x_set;
  const std::optional<SingleAgentBM>& attached = lead_agent == 1 ? bm.marginal1 : bm.marginal2;

  MarginalGraphSystem system;
  system.lead_agent = lead_agent;
  system.marginal = LatticeFlowGraph(lead_set);
  Mask lead_full = lead_set.full();
  Mask follow_full = follow_set.full();

  for (Mask a : nonempty_subsets(lead_full))
    for (int x : elements_of(a)) {
      if (attached) {
        system.marginal.at(a, x) = attached->at(a, x);
      } else {
        // q_lead(x,A) = sum over the follower of q(x,y|A,Y); equals the
        // marginal polynomial whenever marginality holds.
        Rational total = 0;
        for (int y : elements_of(follow_full))
          total += lead_agent == 1 ? bm.at(a, follow_full, x, y) : bm.at(follow_full, a, y, x);
        system.marginal.at(a, x) = total;
      }
    }

  for (Mask a : nonempty_subsets(lead_full))
    for (int x : elements_of(a)) {
      LatticeFlowGraph conditional(follow_set);
      for (Mask b : nonempty_subsets(follow_full))
        for (int y : elements_of(b))
          conditional.at(b, y) = lead_agent == 1 ? bm.at(a, b, x, y) : bm.at(b, a, y, x);
      system.conditionals[{a, x}] = std::move(conditional);
    }
  return system;
}

// ---------------------------------------------------------------------------
// Export

inline nlohmann::json graph_to_json(const LatticeFlowGraph& graph) {
  auto subsets = nonempty_subsets(graph.ground.full());
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](Mask l, Mask r) { return set_size(l) > set_size(r); });
  nlohmann::json edges = nlohmann::json::array();
  for (Mask a : subsets)
    for (int x : elements_of(a)) {
      const Rational& cap = graph.at(a, x);
      if (cap == 0) continue;
      edges.push_back({{"from", graph.ground.labels_of(a)},
                       {"to", graph.ground.labels_of(without(a, x))},
                       {"cap", format_rational(cap)}});
    }
  return nlohmann::json{{"edges", std::move(edges)}};
}

inline std::string graph_to_dot(const LatticeFlowGraph& graph, const std::string& name) {
  std::string dot = "digraph \"" + name + "\" {\n  rankdir=TB;\n";
  auto subsets = nonempty_subsets(graph.ground.full());
  std::stable_sort(subsets.begin(), subsets.end(),
                   [](Mask l, Mask r) { return set_size(l) > set_size(r); });
  for (Mask a : subsets)
    for (int x : elements_of(a)) {
      const Rational& cap = graph.at(a, x);
      if (cap == 0) continue;
      dot += "  \"" + graph.ground.describe(a) + "\" -> \"" + graph.ground.describe(without(a, x)) +
             "\" [label=\"" + format_rational(cap) + "\"];\n";
    }
  dot += "}\n";
  return dot;
}

}  // namespace jointchoice
