#pragma once

// Command-line front end. Every subcommand is a thin adapter over the
// library: parse inputs, call one operation, render a report. The machine
// report format is versioned and stable; exit codes are 0 for
// pass/feasible/success, 1 for fail/infeasible, 2 for usage, format, or
// precondition errors.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "jointchoice/corpus.hpp"
#include "jointchoice/decompose.hpp"
#include "jointchoice/io.hpp"
#include "jointchoice/oracle.hpp"

namespace jointchoice {

struct CliReport {
  std::string command;
  Json verdicts = Json::object();
  std::vector<Witness> witnesses;
  std::vector<std::string> outputs;
  Json payload = Json::object();  // command-specific extras
  std::string error;

  Json to_json(long long timing_ms) const {
    Json doc;
    doc["report_version"] = 1;
    doc["command"] = command;
    doc["verdicts"] = verdicts;
    Json ws = Json::array();
    for (const auto& w : witnesses) {
      Json loc = Json::object();
      for (const auto& [name, value] : w.location) loc[name] = value;
      ws.push_back({{"identity", w.identity},
                    {"location", loc},
                    {"lhs", format_rational(w.lhs)},
                    {"rhs", format_rational(w.rhs)}});
    }
    doc["witnesses"] = ws;
    doc["outputs"] = outputs;
    for (auto it = payload.begin(); it != payload.end(); ++it) doc[it.key()] = it.value();
    if (!error.empty()) doc["error"] = error;
    doc["timing_ms"] = timing_ms;
    return doc;
  }

  void render_text(std::ostream& out, long long timing_ms) const {
    out << command << ":\n";
    for (auto it = verdicts.begin(); it != verdicts.end(); ++it)
      out << "  " << it.key() << ": " << it.value().get<std::string>() << "\n";
    for (const auto& w : witnesses) out << "  witness: " << w.describe() << "\n";
    for (auto it = payload.begin(); it != payload.end(); ++it)
      if (it.value().is_string() || it.value().is_number())
        out << "  " << it.key() << ": " << it.value().dump() << "\n";
    for (const auto& o : outputs) out << "  wrote " << o << "\n";
    if (!error.empty()) out << "  error: " << error << "\n";
    out << "  (" << timing_ms << " ms)\n";
  }
};

namespace cli_detail {

inline std::string verdict_word(bool pass) { return pass ? "pass" : "fail"; }

inline void take_witnesses(CliReport& report, const AxiomReport& axiom) {
  report.witnesses.insert(report.witnesses.end(), axiom.witnesses.begin(), axiom.witnesses.end());
}

inline BudgetPair parse_budget_pair(const std::string& text, const JointChoiceRule& rule) {
  auto bar = text.find('|');
  if (bar == std::string::npos)
    throw FormatError("budget pair must look like \"x1,x2|y1\": missing '|' in '" + text + "'");
  auto split = [](const std::string& s) {
    std::vector<std::string> labels;
    std::string current;
    for (char c : s) {
      if (c == ',') {
        labels.push_back(current);
        current.clear();
      } else {
        current += c;
      }
    }
    labels.push_back(current);
    return labels;
  };
  Mask a = rule.x_set().mask_of(split(text.substr(0, bar)));
  Mask b = rule.y_set().mask_of(split(text.substr(bar + 1)));
  return {a, b};
}

inline TraceSink make_trace_sink(bool enabled, std::ostream& err) {
  if (!enabled) return nullptr;
  return [&err](const TraceEvent& event) {
    Json line = {{"event", event.kind},
                 {"context", event.context},
                 {"edge", event.edge},
                 {"order", event.order},
                 {"amount", format_rational(event.amount)},
                 {"negatives_remaining", event.negatives_remaining}};
    err << line.dump() << "\n";
  };
}

}  // namespace cli_detail

// Runs the CLI on `args` (without the program name). Reports go to `out`,
// trace lines and parse diagnostics to `err`.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact analysis of random joint choice rules"};
  app.require_subcommand(1);

  std::string format = "text";
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"text", "json"}));
  bool trace = false;
  app.add_flag("--trace", trace, "stream one JSON line per algorithm step to stderr");
  std::size_t cap = 0;
  app.add_option("--cap", cap, "override enumeration caps (order pairs, choice pairs, paths)");

  std::string dataset_path, measure_path, out_path, graphs_dir, measure_out;
  std::string agent = "joint", lead = "auto", mode = "prob";
  std::vector<std::string> budget_args;
  std::uint64_t seed = 0;
  int gen_x = 3, gen_y = 3, gen_k = 3;

  auto* check_cmd = app.add_subcommand("check", "test marginality, non-negativity, recursivity");
  check_cmd->add_option("dataset", dataset_path)->required();

  auto* bm_cmd = app.add_subcommand("bm", "dump Block-Marschak polynomials");
  bm_cmd->add_option("dataset", dataset_path)->required();
  bm_cmd->add_option("--agent", agent, "joint, 1, or 2")->check(CLI::IsMember({"joint", "1", "2"}));
  bm_cmd->add_option("--out", out_path, "write polynomial entries to this file");
  bm_cmd->add_option("--graphs-out", graphs_dir, "write DOT files for the marginal graph system");

  auto* decompose_cmd = app.add_subcommand("decompose", "signed order-pair decomposition");
  decompose_cmd->add_option("dataset", dataset_path)->required();
  decompose_cmd->add_option("--out", out_path, "write the measure to this file");

  auto* rum_cmd = app.add_subcommand("rum", "recover a separable random utility representation");
  rum_cmd->add_option("dataset", dataset_path)->required();
  rum_cmd->add_option("--lead", lead, "lead agent")->check(CLI::IsMember({"auto", "1", "2"}));
  rum_cmd->add_option("--out", out_path, "write the measure to this file");

  auto* unique_cmd = app.add_subcommand("unique", "unique-representation check for one marginal");
  unique_cmd->add_option("dataset", dataset_path)->required();
  unique_cmd->add_option("--agent", agent, "1 or 2")->check(CLI::IsMember({"1", "2"}));

  auto* separable_cmd = app.add_subcommand("separable", "stochastic separability LP");
  separable_cmd->add_option("dataset", dataset_path)->required();
  separable_cmd->add_option("--budgets", budget_args,
                            "budget pairs like \"x1,x2|y1,y2\"; default: all present tables");
  separable_cmd->add_option("--out", out_path, "write the certificate to this file");

  auto* seprum_cmd = app.add_subcommand("sep-rum", "separable random utility LP over order pairs");
  seprum_cmd->add_option("dataset", dataset_path)->required();
  seprum_cmd->add_option("--out", out_path, "write the certificate to this file");

  auto* gen_cmd = app.add_subcommand("gen", "generate a dataset (and generating measure)");
  gen_cmd->add_option("--seed", seed)->required();
  gen_cmd->add_option("--x", gen_x, "alternatives for agent 1");
  gen_cmd->add_option("--y", gen_y, "alternatives for agent 2");
  gen_cmd->add_option("--k", gen_k, "measure support size");
  gen_cmd->add_option("--mode", mode, "prob, signed, rule, or margviol")
      ->check(CLI::IsMember({"prob", "signed", "rule", "margviol"}));
  gen_cmd->add_option("--out", out_path, "dataset file")->required();
  gen_cmd->add_option("--measure-out", measure_out, "generating measure file");

  auto* verify_cmd = app.add_subcommand("verify", "check a measure against a dataset");
  verify_cmd->add_option("dataset", dataset_path)->required();
  verify_cmd->add_option("measure", measure_path)->required();

  // global flags (--format, --trace, --cap) may follow the subcommand
  for (CLI::App* sub : {check_cmd, bm_cmd, decompose_cmd, rum_cmd, unique_cmd, separable_cmd,
                        seprum_cmd, gen_cmd, verify_cmd})
    sub->fallthrough();

  std::vector<std::string> argv_storage;
  argv_storage.push_back("jointchoice");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  CliReport report;
  int exit_code = 0;
  auto started = std::chrono::steady_clock::now();
  TraceSink sink = cli_detail::make_trace_sink(trace, err);

  try {
    if (check_cmd->parsed()) {
      report.command = "check";
      JointChoiceRule rule = load_dataset(dataset_path);
      if (rule.complete()) {
        auto marginality = check_marginality(rule);
        report.verdicts["marginality"] = cli_detail::verdict_word(marginality.pass);
        cli_detail::take_witnesses(report, marginality);
        BlockMarschakTable bm = bm_joint(rule);
        auto nonnegativity = check_nonnegativity(bm);
        report.verdicts["non-negativity"] = cli_detail::verdict_word(nonnegativity.pass);
        cli_detail::take_witnesses(report, nonnegativity);
        auto recursivity = check_recursivity(bm);
        report.verdicts["recursivity"] = cli_detail::verdict_word(recursivity.pass);
        cli_detail::take_witnesses(report, recursivity);
        exit_code = (marginality.pass && nonnegativity.pass && recursivity.pass) ? 0 : 1;
      } else {
        auto given = check_marginality_given(rule);
        report.verdicts["marginality-among-given-tables"] = cli_detail::verdict_word(given.pass);
        report.payload["note"] = "partial rule: only the axioms testable on the given tables ran";
        cli_detail::take_witnesses(report, given);
        exit_code = given.pass ? 0 : 1;
      }
    } else if (bm_cmd->parsed()) {
      report.command = "bm";
      JointChoiceRule rule = load_dataset(dataset_path);
      Json entries;
      if (agent == "joint") {
        entries = bm_to_json(bm_joint(rule));
      } else {
        entries = bm_to_json(bm_marginal(rule, agent == "1" ? 1 : 2));
      }
      if (!out_path.empty()) {
        write_file(out_path, entries.dump(2) + "\n");
        report.outputs.push_back(out_path);
      } else {
        report.payload["bm"] = entries;
      }
      if (!graphs_dir.empty()) {
        int lead_agent = agent == "2" ? 2 : 1;
        MarginalGraphSystem system = build_system(bm_table(rule), lead_agent);
        std::filesystem::create_directories(graphs_dir);
        std::string marginal_path =
            (std::filesystem::path(graphs_dir) / ("marginal_agent" + std::to_string(lead_agent) + ".dot"))
                .string();
        write_file(marginal_path, graph_to_dot(system.marginal, "marginal"));
        report.outputs.push_back(marginal_path);
        for (const auto& [key, graph] : system.conditionals) {
          if (graph.all_zero()) continue;
          const AlternativeSet& lead_set = system.marginal.ground;
          std::string name = "conditional_" + lead_set.label(key.second);
          for (int i : elements_of(key.first)) name += "_" + lead_set.label(i);
          std::string path = (std::filesystem::path(graphs_dir) / (name + ".dot")).string();
          write_file(path, graph_to_dot(graph, name));
          report.outputs.push_back(path);
        }
      }
      report.verdicts["computed"] = "pass";
      exit_code = 0;
    } else if (decompose_cmd->parsed()) {
      report.command = "decompose";
      JointChoiceRule rule = load_dataset(dataset_path);
      DecomposeOptions options;
      options.sink = sink;
      SignedPairMeasure measure = decompose_into_order_pairs(rule, options);
      int negatives = 0;
      for (const auto& [pair, w] : measure.weights())
        if (w < 0) ++negatives;
      report.verdicts["decomposed"] = "pass";
      report.payload["support"] = measure.weights().size();
      report.payload["negative_weights"] = negatives;
      Json doc = measure_to_json(measure, rule.x_set(), rule.y_set());
      if (!out_path.empty()) {
        write_file(out_path, doc.dump(2) + "\n");
        report.outputs.push_back(out_path);
      } else {
        report.payload["measure"] = doc;
      }
      exit_code = 0;
    } else if (rum_cmd->parsed()) {
      report.command = "rum";
      JointChoiceRule rule = load_dataset(dataset_path);
      DecomposeOptions options;
      options.sink = sink;
      if (cap) options.path_cap = cap;
      int lead_agent = lead == "auto" ? 0 : (lead == "1" ? 1 : 2);
      SignedPairMeasure measure = recover_random_utility(rule, lead_agent, options);
      report.verdicts["recovered"] = "pass";
      report.payload["support"] = measure.weights().size();
      Json doc = measure_to_json(measure, rule.x_set(), rule.y_set());
      if (!out_path.empty()) {
        write_file(out_path, doc.dump(2) + "\n");
        report.outputs.push_back(out_path);
      } else {
        report.payload["measure"] = doc;
      }
      exit_code = 0;
    } else if (unique_cmd->parsed()) {
      report.command = "unique";
      JointChoiceRule rule = load_dataset(dataset_path);
      int which = agent == "2" ? 2 : 1;
      SingleAgentBM marginal = bm_marginal(rule, which);
      UniqueRumResult result =
          unique_rum_check(marginal, cap ? cap : kDefaultSupportedPathCap);
      report.verdicts["unique-representation"] = cli_detail::verdict_word(result.unique);
      if (result.unique) {
        Json certs = Json::array();
        const AlternativeSet& ground = marginal.ground;
        for (const auto& cert : result.certificates)
          certs.push_back({{"order", render_order(cert.order, ground)},
                           {"edge", "(" + ground.label(cert.removed_element()) + "," +
                                        ground.describe(cert.parent_set()) + ")"}});
        report.payload["certificates"] = certs;
      } else if (result.path_without_edge) {
        report.payload["path_without_unique_edge"] =
            render_order(*result.path_without_edge, marginal.ground);
      }
      exit_code = result.unique ? 0 : 1;
    } else if (separable_cmd->parsed()) {
      report.command = "separable";
      JointChoiceRule rule = load_dataset(dataset_path);
      std::vector<BudgetPair> budgets;
      for (const auto& text : budget_args) budgets.push_back(cli_detail::parse_budget_pair(text, rule));
      LpOracleOptions options;
      options.cap = cap;
      auto verdict = lp_stochastic_separability(rule, budgets, options);
      report.verdicts["stochastically-separable"] =
          verdict.feasible ? "feasible" : "infeasible";
      if (verdict.feasible) {
        Json doc = measure_to_json(*verdict.certificate, rule.x_set(), rule.y_set());
        if (!out_path.empty()) {
          write_file(out_path, doc.dump(2) + "\n");
          report.outputs.push_back(out_path);
        } else {
          report.payload["certificate"] = doc;
        }
      } else {
        report.payload["infeasibility_gap"] = format_rational(verdict.infeasibility);
      }
      exit_code = verdict.feasible ? 0 : 1;
    } else if (seprum_cmd->parsed()) {
      report.command = "sep-rum";
      JointChoiceRule rule = load_dataset(dataset_path);
      LpOracleOptions options;
      options.cap = cap;
      auto verdict = lp_separable_rum(rule, options);
      report.verdicts["separable-random-utility"] = verdict.feasible ? "feasible" : "infeasible";
      if (verdict.feasible) {
        Json doc = measure_to_json(*verdict.certificate, rule.x_set(), rule.y_set());
        if (!out_path.empty()) {
          write_file(out_path, doc.dump(2) + "\n");
          report.outputs.push_back(out_path);
        } else {
          report.payload["certificate"] = doc;
        }
      } else {
        report.payload["infeasibility_gap"] = format_rational(verdict.infeasibility);
      }
      exit_code = verdict.feasible ? 0 : 1;
    } else if (gen_cmd->parsed()) {
      report.command = "gen";
      GeneratorSpec spec;
      spec.seed = seed;
      spec.x_size = gen_x;
      spec.y_size = gen_y;
      spec.support = gen_k;
      spec.mode = mode == "prob"     ? GeneratorMode::kProbabilityPairMeasure
                  : mode == "signed" ? GeneratorMode::kSignedPairMeasure
                  : mode == "rule"   ? GeneratorMode::kArbitraryRule
                                     : GeneratorMode::kMarginalityViolatingRule;
      GeneratedInstance instance = generate(spec);
      write_file(out_path, serialize(instance.rule));
      report.outputs.push_back(out_path);
      if (!measure_out.empty()) {
        if (!instance.measure)
          throw PreconditionError("mode '" + mode + "' has no generating measure");
        write_file(measure_out,
                   serialize(*instance.measure, instance.rule.x_set(), instance.rule.y_set()));
        report.outputs.push_back(measure_out);
      }
      report.verdicts["generated"] = "pass";
      exit_code = 0;
    } else if (verify_cmd->parsed()) {
      report.command = "verify";
      JointChoiceRule rule = load_dataset(dataset_path);
      Json doc = Json::parse(read_file(measure_path));
      std::string type = measure_type(doc);
      AxiomReport result;
      if (type == "order_pairs") {
        result = verify_measure(rule, pair_measure_from_json(doc, rule.x_set(), rule.y_set()));
      } else if (type == "choice_pairs") {
        result = verify_measure(rule, choice_pair_measure_from_json(doc, rule.x_set(), rule.y_set()));
      } else {
        throw PreconditionError("an '" + type + "' measure cannot be verified against a joint rule");
      }
      report.verdicts["measure-reproduces-rule"] = cli_detail::verdict_word(result.pass);
      cli_detail::take_witnesses(report, result);
      exit_code = result.pass ? 0 : 1;
    }
  } catch (const FormatError& e) {
    report.error = e.what();
    exit_code = 2;
  } catch (const PreconditionError& e) {
    report.error = e.what();
    exit_code = 2;
  } catch (const InternalError& e) {
    report.error = std::string("internal error: ") + e.what();
    exit_code = 2;
  }

  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                       started)
                     .count();
  if (format == "json")
    out << report.to_json(elapsed).dump(2) << "\n";
  else
    report.render_text(out, elapsed);
  return exit_code;
}

}  // namespace jointchoice
