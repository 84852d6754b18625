#pragma once

// Dataset and measure file formats. Both are UTF-8 JSON; probabilities and
// weights travel as strings ("num/den" in lowest terms on output; decimals
// also accepted on input). Serialization is canonical and deterministic, so
// parse(serialize(v)) == v bit-exactly.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jointchoice/core.hpp"

namespace jointchoice {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Datasets

inline JointChoiceRule dataset_from_json(const Json& doc) {
  if (!doc.is_object()) throw FormatError("dataset must be a JSON object");
  for (const auto& key : {"X", "Y", "complete", "tables"})
    if (!doc.contains(key)) throw FormatError(std::string("dataset is missing key \"") + key + "\"");
  AlternativeSet x_set(doc.at("X").get<std::vector<std::string>>());
  AlternativeSet y_set(doc.at("Y").get<std::vector<std::string>>());
  bool complete = doc.at("complete").get<bool>();

  std::map<BudgetPair, ProbabilityTable> tables;
  for (const auto& entry : doc.at("tables")) {
    Mask a = x_set.mask_of(entry.at("A").get<std::vector<std::string>>());
    Mask b = y_set.mask_of(entry.at("B").get<std::vector<std::string>>());
    if (tables.count({a, b}))
      throw FormatError("duplicate table for " + x_set.describe(a) + "x" + y_set.describe(b));
    ProbabilityTable table;
    for (const auto& cell : entry.at("p")) {
      int x = x_set.index_of(cell.at("x").get<std::string>());
      int y = y_set.index_of(cell.at("y").get<std::string>());
      if (table.count({x, y})) throw FormatError("duplicate cell in table");
      table[{x, y}] = parse_rational(cell.at("pr").get<std::string>());
    }
    tables[{a, b}] = std::move(table);
  }
  return JointChoiceRule(std::move(x_set), std::move(y_set), std::move(tables), complete);
}

inline JointChoiceRule parse_dataset(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("dataset is not valid JSON: ") + e.what());
  }
  return dataset_from_json(doc);
}

inline Json dataset_to_json(const JointChoiceRule& rule) {
  Json doc;
  doc["X"] = rule.x_set().labels();
  doc["Y"] = rule.y_set().labels();
  doc["complete"] = rule.complete();
  Json tables = Json::array();
  for (const auto& [budgets, table] : rule.tables()) {
    Json entry;
    entry["A"] = rule.x_set().labels_of(budgets.first);
    entry["B"] = rule.y_set().labels_of(budgets.second);
    Json cells = Json::array();
    for (const auto& [cell, v] : table) {
      cells.push_back({{"x", rule.x_set().label(cell.first)},
                       {"y", rule.y_set().label(cell.second)},
                       {"pr", format_rational(v)}});
    }
    entry["p"] = std::move(cells);
    tables.push_back(std::move(entry));
  }
  doc["tables"] = std::move(tables);
  return doc;
}

inline std::string serialize(const JointChoiceRule& rule) { return dataset_to_json(rule).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Measures
//
// {"type": "order_pairs" | "orders" | "choice_pairs", "entries": [...]}
//   order_pairs: {"first": [labels best-first], "second": [labels], "w": s}
//   orders:      {"first": [labels best-first], "w": s}
//   choice_pairs: "first"/"second" are lists of {"menu": [labels], "pick": l}
//
// Ground sets are not stored in measure files; the caller supplies them
// (they come from the dataset the measure is verified against).

inline Json order_to_json(const LinearOrder& order, const AlternativeSet& ground) {
  Json out = Json::array();
  for (int i : order.ranking()) out.push_back(ground.label(i));
  return out;
}

inline LinearOrder order_from_json(const Json& arr, const AlternativeSet& ground) {
  std::vector<int> ranking;
  for (const auto& label : arr) ranking.push_back(ground.index_of(label.get<std::string>()));
  return LinearOrder(std::move(ranking), ground.size());
}

inline Json choice_function_to_json(const ChoiceFunction& c, const AlternativeSet& ground) {
  Json out = Json::array();
  for (const auto& [menu, pick] : c.picks)
    out.push_back({{"menu", ground.labels_of(menu)}, {"pick", ground.label(pick)}});
  return out;
}

inline ChoiceFunction choice_function_from_json(const Json& arr, const AlternativeSet& ground) {
  ChoiceFunction c;
  for (const auto& entry : arr) {
    Mask menu = ground.mask_of(entry.at("menu").get<std::vector<std::string>>());
    int pick = ground.index_of(entry.at("pick").get<std::string>());
    if (c.picks.count(menu)) throw FormatError("choice function lists a menu twice");
    c.picks[menu] = pick;
  }
  validate_choice_function(c, ground);
  return c;
}

inline Json measure_to_json(const SignedPairMeasure& m, const AlternativeSet& x_set,
                            const AlternativeSet& y_set) {
  Json entries = Json::array();
  for (const auto& [pair, w] : m.weights())
    entries.push_back({{"first", order_to_json(pair.first, x_set)},
                       {"second", order_to_json(pair.second, y_set)},
                       {"w", format_rational(w)}});
  return Json{{"type", "order_pairs"}, {"entries", std::move(entries)}};
}

inline Json measure_to_json(const SignedOrderMeasure& m, const AlternativeSet& ground) {
  Json entries = Json::array();
  for (const auto& [order, w] : m.weights())
    entries.push_back({{"first", order_to_json(order, ground)}, {"w", format_rational(w)}});
  return Json{{"type", "orders"}, {"entries", std::move(entries)}};
}

inline Json measure_to_json(const SignedChoicePairMeasure& m, const AlternativeSet& x_set,
                            const AlternativeSet& y_set) {
  Json entries = Json::array();
  for (const auto& [pair, w] : m.weights())
    entries.push_back({{"first", choice_function_to_json(pair.first, x_set)},
                       {"second", choice_function_to_json(pair.second, y_set)},
                       {"w", format_rational(w)}});
  return Json{{"type", "choice_pairs"}, {"entries", std::move(entries)}};
}

inline std::string serialize(const SignedPairMeasure& m, const AlternativeSet& x_set,
                             const AlternativeSet& y_set) {
  return measure_to_json(m, x_set, y_set).dump(2) + "\n";
}
inline std::string serialize(const SignedOrderMeasure& m, const AlternativeSet& ground) {
  return measure_to_json(m, ground).dump(2) + "\n";
}
inline std::string serialize(const SignedChoicePairMeasure& m, const AlternativeSet& x_set,
                             const AlternativeSet& y_set) {
  return measure_to_json(m, x_set, y_set).dump(2) + "\n";
}

inline std::string measure_type(const Json& doc) {
  if (!doc.is_object() || !doc.contains("type")) throw FormatError("measure is missing \"type\"");
  return doc.at("type").get<std::string>();
}

inline SignedPairMeasure pair_measure_from_json(const Json& doc, const AlternativeSet& x_set,
                                                const AlternativeSet& y_set) {
  if (measure_type(doc) != "order_pairs") throw FormatError("expected an order_pairs measure");
  std::map<OrderPair, Rational> weights;
  for (const auto& entry : doc.at("entries")) {
    OrderPair pair{order_from_json(entry.at("first"), x_set), order_from_json(entry.at("second"), y_set)};
    weights[pair] += parse_rational(entry.at("w").get<std::string>());
  }
  return SignedPairMeasure(std::move(weights));
}

inline SignedOrderMeasure order_measure_from_json(const Json& doc, const AlternativeSet& ground) {
  if (measure_type(doc) != "orders") throw FormatError("expected an orders measure");
  std::map<LinearOrder, Rational> weights;
  for (const auto& entry : doc.at("entries"))
    weights[order_from_json(entry.at("first"), ground)] += parse_rational(entry.at("w").get<std::string>());
  return SignedOrderMeasure(std::move(weights));
}

inline SignedChoicePairMeasure choice_pair_measure_from_json(const Json& doc, const AlternativeSet& x_set,
                                                             const AlternativeSet& y_set) {
  if (measure_type(doc) != "choice_pairs") throw FormatError("expected a choice_pairs measure");
  std::map<ChoiceFunctionPair, Rational> weights;
  for (const auto& entry : doc.at("entries")) {
    ChoiceFunctionPair pair{choice_function_from_json(entry.at("first"), x_set),
                            choice_function_from_json(entry.at("second"), y_set)};
    weights[pair] += parse_rational(entry.at("w").get<std::string>());
  }
  return SignedChoicePairMeasure(std::move(weights));
}

inline SignedPairMeasure parse_pair_measure(const std::string& text, const AlternativeSet& x_set,
                                            const AlternativeSet& y_set) {
  return pair_measure_from_json(Json::parse(text), x_set, y_set);
}
inline SignedOrderMeasure parse_order_measure(const std::string& text, const AlternativeSet& ground) {
  return order_measure_from_json(Json::parse(text), ground);
}
inline SignedChoicePairMeasure parse_choice_pair_measure(const std::string& text,
                                                         const AlternativeSet& x_set,
                                                         const AlternativeSet& y_set) {
  return choice_pair_measure_from_json(Json::parse(text), x_set, y_set);
}

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << content;
}

inline JointChoiceRule load_dataset(const std::string& path) { return parse_dataset(read_file(path)); }

}  // namespace jointchoice
