#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace jointchoice {

// All probabilities and polynomial values in this library are exact
// rationals: no floating point anywhere, so zero tests and equality
// comparisons are decisive.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an algorithm invariant that the math guarantees is observed
// to fail; always an implementation bug, never a data problem.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The bundled boost::rational rejects negative denominators outright when
// the integer type is unbounded, so canonicalize the sign before handing the
// pair over.
inline Rational make_rational(BigInt num, BigInt den) {
  if (den == 0) throw FormatError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

inline Rational make_rational(long long num, long long den = 1) {
  return make_rational(BigInt(num), BigInt(den));
}

// Canonical text form: "num" when the value is an integer, "num/den"
// otherwise (always lowest terms, denominator positive).
inline std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

// Accepts "num", "num/den", or a plain decimal literal such as "0.25"
// (converted exactly, e.g. "0.2" -> 1/5).
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw FormatError("empty rational literal");
  auto parse_int = [](const std::string& s) -> BigInt {
    if (s.empty() || (s.size() == 1 && (s[0] == '+' || s[0] == '-')))
      throw FormatError("bad integer literal '" + s + "'");
    for (std::size_t i = 0; i < s.size(); ++i) {
      char c = s[i];
      if (i == 0 && (c == '+' || c == '-')) continue;
      if (c < '0' || c > '9') throw FormatError("bad integer literal '" + s + "'");
    }
    return BigInt(s);
  };
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    BigInt num = parse_int(text.substr(0, slash));
    BigInt den = parse_int(text.substr(slash + 1));
    if (den == 0) throw FormatError("rational with zero denominator: '" + text + "'");
    return make_rational(num, den);
  }
  auto dot = text.find('.');
  if (dot != std::string::npos) {
    std::string head = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (frac.empty()) throw FormatError("bad decimal literal '" + text + "'");
    bool negative = !head.empty() && head[0] == '-';
    if (!head.empty() && (head[0] == '+' || head[0] == '-')) head = head.substr(1);
    if (head.empty()) head = "0";
    BigInt whole = parse_int(head);
    BigInt digits = parse_int(frac);
    if (digits < 0) throw FormatError("bad decimal literal '" + text + "'");
    BigInt scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational value = Rational(whole) + Rational(digits, scale);
    return negative ? -value : value;
  }
  return Rational(parse_int(text));
}

}  // namespace jointchoice
