#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "swarmrank/aggregate.hpp"
#include "swarmrank/engine.hpp"
#include "swarmrank/grammar_dsl.hpp"
#include "swarmrank/io.hpp"

namespace {

using namespace swarmrank;

// exit statuses are part of the interface: 0 success, 1 validation/domain
// error, 2 usage error, 3 I/O or parse error
constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kUsageError = 2;
constexpr int kIoError = 3;

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string quote(const std::string& s) { return '"' + json_escape(s) + '"'; }

std::string ties_json(const std::vector<std::vector<NodeId>>& ties) {
  std::string out = "[";
  for (std::size_t i = 0; i < ties.size(); ++i) {
    out += i ? ", [" : "[";
    for (std::size_t j = 0; j < ties[i].size(); ++j) {
      if (j) out += ", ";
      out += quote(ties[i][j]);
    }
    out += "]";
  }
  out += "]";
  return out;
}

std::string ranking_entries_json(const Ranking& r, const char* key) {
  std::string out = "[";
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    if (i) out += ", ";
    out += "{" + std::string(quote(key)) + ": " + quote(r.entries[i].id) +
           ", \"weight\": " + format_weight(r.entries[i].weight) + "}";
  }
  out += "]";
  return out;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

struct EngineFlags {
  std::string mode = "det";
  std::uint64_t seed = 0;
  int particles = 100000;
  double delta = -1.0;  // <0: per-grammar default
  int epochs = 0;
  double eps_threshold = 0.0;
  double tol = -1.0;
  double prune = -1.0;
  int step_cap = 0;
  std::string uses = "recursive";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--mode", mode, "Execution mode: det (default) or mc")
        ->check(CLI::IsMember({"det", "mc"}));
    cmd->add_option("--seed", seed, "Monte Carlo seed (default 0)");
    cmd->add_option("--particles", particles, "Monte Carlo particles per source (default 100000)");
    cmd->add_option("--delta", delta,
                    "Energy decay per step; defaults depend on the grammar (0 for dd/dictator, "
                    "0.15 otherwise); these defaults are implementation choices");
    cmd->add_option("--epochs", epochs, "Epoch cap (default 50)");
    cmd->add_option("--eps-threshold", eps_threshold,
                    "Particle death threshold on post-decay energy (default 1e-6, an "
                    "implementation choice)");
    cmd->add_option("--tol", tol,
                    "Convergence tolerance on 1 - cosine (default 1e-6, an implementation "
                    "choice)");
    cmd->add_option("--prune", prune,
                    "Deterministic mode: drop fragments below this probability-weighted energy "
                    "(default 1e-12)");
    cmd->add_option("--step-cap", step_cap, "Maximum steps per particle (default 10000)");
    cmd->add_option("--uses", uses, "Problem categorization for uses weights (direct|recursive)")
        ->check(CLI::IsMember({"direct", "recursive"}));
  }

  EngineOverrides overrides() const {
    EngineOverrides o;
    o.monte_carlo = mode == "mc";
    o.seed = seed;
    o.particles_per_source = particles;
    if (delta >= 0.0) o.decay = delta;
    if (epochs > 0) o.max_epochs = epochs;
    if (eps_threshold > 0.0) o.energy_threshold = eps_threshold;
    if (tol >= 0.0) o.convergence_tolerance = tol;
    if (prune >= 0.0) o.branch_prune_threshold = prune;
    if (step_cap > 0) o.max_steps_per_particle = step_cap;
    o.uses_method = uses == "direct" ? UsesMethod::Direct : UsesMethod::Recursive;
    return o;
  }
};

Network load_validated(const std::string& path) {
  Network net = load_scenario_file(path);
  auto violations = net.validate();
  if (!violations.empty()) {
    for (const auto& v : violations)
      std::cerr << "violation " << v.rule << " " << v.subject << ": " << v.detail << "\n";
    throw Error(Errc::SchemaViolation,
                std::to_string(violations.size()) + " violation(s) in '" + path + "'");
  }
  return net;
}

Algorithm make_algorithm(const std::string& alg, const std::string& grammar_path,
                         const std::string& dictator, const std::string& metric,
                         const Network& net) {
  if (alg == "dd") return Algorithm::dd();
  if (alg == "rd") return Algorithm::rd();
  if (alg == "ddd") return Algorithm::ddd();
  if (alg == "dictator") {
    if (!dictator.empty()) return Algorithm::dictator_by_id(dictator);
    if (metric == "eigenvector")
      return Algorithm::dictator_by_metric(DictatorMetric::EigenvectorCentrality);
    return Algorithm::dictator_by_metric(DictatorMetric::InDegreeTrusts);
  }
  // custom
  if (grammar_path.empty())
    fail(Errc::InvalidConfig, "--alg custom requires --grammar");
  return Algorithm::custom(parse_grammar(read_file(grammar_path), net.schema()));
}

std::string rank_json(const SolutionRankResult& r) {
  std::ostringstream out;
  out << "{\n"
      << "  \"problem\": " << quote(r.problem) << ",\n"
      << "  \"algorithm\": " << quote(r.algorithm) << ",\n"
      << "  \"ranking\": " << ranking_entries_json(r.ranking, "solution") << ",\n"
      << "  \"ties\": " << ties_json(r.ranking.ties) << ",\n"
      << "  \"epochs\": " << r.run.epochs_run << ",\n"
      << "  \"converged\": " << (r.run.converged ? "true" : "false") << "\n"
      << "}\n";
  return out.str();
}

void print_pretty_ranking(const SolutionRankResult& r) {
  std::cout << "problem " << r.problem << ", algorithm " << r.algorithm;
  if (r.dictator) std::cout << ", dictator " << *r.dictator << (r.dictator_tie ? " (tie)" : "");
  std::cout << "\n";
  for (const auto& e : r.ranking.entries)
    std::cout << "  " << e.id << "  " << format_weight(e.weight) << "\n";
  std::cout << (r.run.converged ? "converged" : "epoch cap reached") << " after "
            << r.run.epochs_run << " epoch(s)\n";
}

int cmd_validate(const std::string& path) {
  Network net = load_scenario_file(path);
  auto violations = net.validate();
  if (violations.empty()) {
    std::cout << "OK, " << net.node_count() << " nodes, " << net.edge_count() << " edges\n";
    return kOk;
  }
  for (const auto& v : violations)
    std::cout << "violation " << v.rule << " " << v.subject << ": " << v.detail << "\n";
  std::cout << violations.size() << " violation(s)\n";
  return kDomainError;
}

int cmd_grammar_check(const std::string& path) {
  std::string text = read_file(path);
  try {
    TraversalGrammar g = parse_grammar(text);
    std::cout << serialize_grammar(g);
    return kOk;
  } catch (const GrammarParseError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return kDomainError;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarmrank: collective solution ranking on multi-relational networks"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "Check a scenario file against the schema");
  std::string validate_path;
  validate->add_option("graph", validate_path, "Scenario JSON file")->required();

  // rank
  auto* rank = app.add_subcommand("rank", "Compute a collective solution ranking");
  std::string rank_path, rank_problem, rank_alg = "dd", rank_grammar, rank_dictator,
              rank_metric = "indegree", rank_out, rank_trace;
  bool rank_pretty = false;
  EngineFlags rank_flags;
  rank->add_option("graph", rank_path, "Scenario JSON file")->required();
  rank->add_option("--problem", rank_problem, "Problem node id")->required();
  rank->add_option("--alg", rank_alg, "Algorithm: dd|rd|ddd|dictator|custom")
      ->check(CLI::IsMember({"dd", "rd", "ddd", "dictator", "custom"}));
  rank->add_option("--grammar", rank_grammar, "Grammar DSL file (--alg custom)");
  rank->add_option("--dictator", rank_dictator, "Dictator node id (--alg dictator)");
  rank->add_option("--metric", rank_metric, "Dictator metric: indegree|eigenvector")
      ->check(CLI::IsMember({"indegree", "eigenvector"}));
  rank->add_option("--out", rank_out, "Write ranking JSON here instead of stdout");
  rank->add_option("--trace", rank_trace, "Write the convergence trace CSV here");
  rank->add_flag("--pretty", rank_pretty, "Human-readable output");
  rank_flags.add_to(rank);

  // categorize
  auto* categorize = app.add_subcommand("categorize", "Rank domains for a problem");
  std::string cat_path, cat_problem, cat_method = "recursive", cat_out;
  bool cat_pretty = false;
  EngineFlags cat_flags;
  categorize->add_option("graph", cat_path, "Scenario JSON file")->required();
  categorize->add_option("--problem", cat_problem, "Problem node id")->required();
  categorize->add_option("--method", cat_method, "direct|recursive")
      ->check(CLI::IsMember({"direct", "recursive"}));
  categorize->add_option("--out", cat_out, "Write JSON here instead of stdout");
  categorize->add_flag("--pretty", cat_pretty, "Human-readable output");
  cat_flags.add_to(categorize);

  // decide
  auto* decide = app.add_subcommand("decide", "Rank and select a final outcome");
  std::string dec_path, dec_problem, dec_alg = "dd", dec_grammar, dec_dictator,
              dec_metric = "indegree", dec_selection = "plurality", dec_out;
  bool dec_pretty = false;
  EngineFlags dec_flags;
  decide->add_option("graph", dec_path, "Scenario JSON file")->required();
  decide->add_option("--problem", dec_problem, "Problem node id")->required();
  decide->add_option("--alg", dec_alg, "Algorithm: dd|rd|ddd|dictator|custom")
      ->check(CLI::IsMember({"dd", "rd", "ddd", "dictator", "custom"}));
  decide->add_option("--grammar", dec_grammar, "Grammar DSL file (--alg custom)");
  decide->add_option("--dictator", dec_dictator, "Dictator node id (--alg dictator)");
  decide->add_option("--metric", dec_metric, "Dictator metric: indegree|eigenvector")
      ->check(CLI::IsMember({"indegree", "eigenvector"}));
  decide->add_option("--selection", dec_selection, "plurality|average")
      ->check(CLI::IsMember({"plurality", "average"}));
  decide->add_option("--out", dec_out, "Write JSON here instead of stdout");
  decide->add_flag("--pretty", dec_pretty, "Human-readable output");
  dec_flags.add_to(decide);

  // grammar-check
  auto* gcheck = app.add_subcommand("grammar-check", "Parse a grammar file; print canonical form");
  std::string gcheck_path;
  gcheck->add_option("grammar", gcheck_path, "Grammar DSL file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*validate) return cmd_validate(validate_path);
    if (*gcheck) return cmd_grammar_check(gcheck_path);

    if (*rank) {
      Network net = load_validated(rank_path);
      Algorithm alg = make_algorithm(rank_alg, rank_grammar, rank_dictator, rank_metric, net);
      SolutionRankResult r = rank_solutions(net, rank_problem, alg, rank_flags.overrides());
      if (!rank_trace.empty()) {
        std::ofstream csv(rank_trace, std::ios::binary);
        if (!csv) fail(Errc::IoError, "cannot write '" + rank_trace + "'");
        write_trace_csv(r.run, csv);
      }
      if (rank_pretty) {
        print_pretty_ranking(r);
      } else {
        emit(rank_json(r), rank_out);
      }
      return kOk;
    }

    if (*categorize) {
      Network net = load_validated(cat_path);
      UsesMethod method = cat_method == "direct" ? UsesMethod::Direct : UsesMethod::Recursive;
      EngineOverrides overrides = cat_flags.overrides();
      DomainRankResult r = rank_domains(net, cat_problem, method, overrides);
      UsesWeights uses = compute_uses_weights(net, cat_problem, method, overrides);
      if (cat_pretty) {
        std::cout << "problem " << cat_problem << ", method " << cat_method << "\n";
        std::cout << "domains:\n";
        for (const auto& e : r.domains.entries)
          std::cout << "  " << e.id << "  " << format_weight(e.weight) << "\n";
        std::cout << "names:\n";
        for (const auto& n : r.names)
          std::cout << "  " << n.name << "  " << format_weight(n.weight) << "\n";
        std::cout << "uses weights:\n";
        for (const auto& [h, per_domain] : uses) {
          std::cout << "  " << h << ":";
          if (per_domain.empty()) std::cout << " (no domains)";
          for (const auto& [d, w] : per_domain) std::cout << " " << d << "=" << format_weight(w);
          std::cout << "\n";
        }
      } else {
        std::ostringstream out;
        out << "{\n"
            << "  \"problem\": " << quote(cat_problem) << ",\n"
            << "  \"method\": " << quote(cat_method) << ",\n"
            << "  \"domains\": " << ranking_entries_json(r.domains, "domain") << ",\n";
        out << "  \"names\": [";
        for (std::size_t i = 0; i < r.names.size(); ++i) {
          if (i) out << ", ";
          out << "{\"name\": " << quote(r.names[i].name)
              << ", \"weight\": " << format_weight(r.names[i].weight) << "}";
        }
        out << "],\n";
        out << "  \"uses\": [";
        bool first_h = true;
        for (const auto& [h, per_domain] : uses) {
          if (!first_h) out << ", ";
          first_h = false;
          out << "{\"human\": " << quote(h) << ", \"weights\": [";
          bool first_d = true;
          for (const auto& [d, w] : per_domain) {
            if (!first_d) out << ", ";
            first_d = false;
            out << "{\"domain\": " << quote(d) << ", \"weight\": " << format_weight(w) << "}";
          }
          out << "]}";
        }
        out << "],\n";
        out << "  \"epochs\": " << r.run.epochs_run << ",\n"
            << "  \"converged\": " << (r.run.converged ? "true" : "false") << "\n"
            << "}\n";
        emit(out.str(), cat_out);
      }
      return kOk;
    }

    if (*decide) {
      Network net = load_validated(dec_path);
      Algorithm alg = make_algorithm(dec_alg, dec_grammar, dec_dictator, dec_metric, net);
      SolutionRankResult r = rank_solutions(net, dec_problem, alg, dec_flags.overrides());
      SelectionRule rule =
          dec_selection == "average" ? SelectionRule::NumericAverage : SelectionRule::Plurality;
      Outcome outcome = select_outcome(r.ranking, rule, net);
      if (dec_pretty) {
        print_pretty_ranking(r);
        if (outcome.winner)
          std::cout << "winner: " << *outcome.winner << (outcome.tie ? " (tie)" : "") << "\n";
        if (outcome.value) std::cout << "value: " << format_weight(*outcome.value) << "\n";
      } else {
        std::ostringstream out;
        out << "{\n"
            << "  \"problem\": " << quote(dec_problem) << ",\n"
            << "  \"algorithm\": " << quote(r.algorithm) << ",\n"
            << "  \"selection\": " << quote(dec_selection) << ",\n";
        if (outcome.winner) out << "  \"winner\": " << quote(*outcome.winner) << ",\n";
        if (outcome.value) out << "  \"value\": " << format_weight(*outcome.value) << ",\n";
        out << "  \"tie\": " << (outcome.tie ? "true" : "false") << ",\n"
            << "  \"ranking\": " << ranking_entries_json(r.ranking, "solution") << ",\n"
            << "  \"ties\": " << ties_json(r.ranking.ties) << "\n"
            << "}\n";
        emit(out.str(), dec_out);
      }
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return (e.code() == Errc::IoError || e.code() == Errc::ParseError) ? kIoError : kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kUsageError;
}
