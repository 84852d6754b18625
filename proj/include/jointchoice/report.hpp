#pragma once

#include <string>
#include <vector>

#include "jointchoice/rational.hpp"

namespace jointchoice {

// One violated identity: which check, at which tuple, with both exact side
// values. Checks collect all witnesses, not just the first.
struct Witness {
  std::string identity;                                       // e.g. "marginality"
  std::vector<std::pair<std::string, std::string>> location;  // named tuple parts
  Rational lhs;
  Rational rhs;

  std::string describe() const {
    std::string s = identity + " at ";
    bool first = true;
    for (const auto& [name, value] : location) {
      if (!first) s += ", ";
      s += name + "=" + value;
      first = false;
    }
    s += ": " + format_rational(lhs) + " != " + format_rational(rhs);
    return s;
  }

  friend bool operator==(const Witness&, const Witness&) = default;
};

struct AxiomReport {
  bool pass = true;
  std::vector<Witness> witnesses;

  void add(Witness w) {
    pass = false;
    witnesses.push_back(std::move(w));
  }
};

}  // namespace jointchoice
