#pragma once

// Shared conveniences for the test suites.

#include <string>
#include <vector>

#include "jointchoice/core.hpp"

namespace jointchoice::testing {

// "a>b>c" -> LinearOrder over `ground`, best first.
inline LinearOrder order_of(const std::string& text, const AlternativeSet& ground) {
  std::vector<int> ranking;
  std::string current;
  for (char c : text) {
    if (c == '>') {
      ranking.push_back(ground.index_of(current));
      current.clear();
    } else {
      current += c;
    }
  }
  ranking.push_back(ground.index_of(current));
  return LinearOrder(std::move(ranking), ground.size());
}

inline SignedPairMeasure pair_measure(
    const std::vector<std::tuple<std::string, std::string, Rational>>& entries,
    const AlternativeSet& x_set, const AlternativeSet& y_set) {
  std::map<OrderPair, Rational> weights;
  for (const auto& [first, second, w] : entries)
    weights[{order_of(first, x_set), order_of(second, y_set)}] += w;
  return SignedPairMeasure(std::move(weights));
}

inline SignedOrderMeasure order_measure(const std::vector<std::pair<std::string, Rational>>& entries,
                                        const AlternativeSet& ground) {
  std::map<LinearOrder, Rational> weights;
  for (const auto& [text, w] : entries) weights[order_of(text, ground)] += w;
  return SignedOrderMeasure(std::move(weights));
}

}  // namespace jointchoice::testing
