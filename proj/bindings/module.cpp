#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "swarmrank/aggregate.hpp"
#include "swarmrank/engine.hpp"
#include "swarmrank/grammar_dsl.hpp"
#include "swarmrank/io.hpp"

namespace py = pybind11;
using namespace swarmrank;

namespace {

Sort sort_arg(const std::string& s) {
  auto sort = sort_from_name(s);
  if (!sort) fail(Errc::ParseError, "unknown sort '" + s + "'");
  return *sort;
}

EngineOverrides make_overrides(const std::string& mode, std::uint64_t seed, int particles,
                               std::optional<double> delta, std::optional<int> epochs,
                               std::optional<double> eps_threshold, std::optional<double> tol,
                               std::optional<double> prune, std::optional<int> step_cap,
                               std::optional<int> threads, const std::string& uses) {
  if (mode != "det" && mode != "mc") fail(Errc::InvalidConfig, "mode must be 'det' or 'mc'");
  if (uses != "direct" && uses != "recursive")
    fail(Errc::InvalidConfig, "uses must be 'direct' or 'recursive'");
  EngineOverrides o;
  o.monte_carlo = mode == "mc";
  o.seed = seed;
  o.particles_per_source = particles;
  o.decay = delta;
  o.max_epochs = epochs;
  o.energy_threshold = eps_threshold;
  o.convergence_tolerance = tol;
  o.branch_prune_threshold = prune;
  o.max_steps_per_particle = step_cap;
  o.threads = threads;
  o.uses_method = uses == "direct" ? UsesMethod::Direct : UsesMethod::Recursive;
  return o;
}

py::list ranking_list(const Ranking& r) {
  py::list out;
  for (const auto& e : r.entries) out.append(py::make_tuple(e.id, e.weight));
  return out;
}

py::dict rank_result_dict(const SolutionRankResult& r) {
  py::dict d;
  d["problem"] = r.problem;
  d["algorithm"] = r.algorithm;
  d["ranking"] = ranking_list(r.ranking);
  d["ties"] = r.ranking.ties;
  d["epochs"] = r.run.epochs_run;
  d["converged"] = r.run.converged;
  d["raw_energy"] = r.run.raw_energy;
  if (r.dictator) d["dictator"] = *r.dictator;
  return d;
}

} // namespace

PYBIND11_MODULE(_swarmrank, m) {
  m.doc() = "Collective solution ranking on multi-relational networks with "
            "grammar-based particle swarms";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "Error");

  py::class_<Network>(m, "Network")
      .def(py::init([](const std::string& schema) {
             auto mode = schema_mode_from_name(schema);
             if (!mode) fail(Errc::ParseError, "unknown schema '" + schema + "'");
             return Network(Schema::core(*mode));
           }),
           py::arg("schema") = "multiple-domains")
      .def(
          "add_node",
          [](Network& net, const std::string& sort, std::optional<NodeId> owner,
             std::optional<NodeId> parent, std::optional<std::string> name,
             std::optional<double> payload, std::optional<NodeId> id) {
            std::optional<NodeId> referent = owner ? owner : parent;
            if (id) return net.add_node_with_id(*id, sort_arg(sort), referent, name, payload);
            return net.add_node(sort_arg(sort), referent, name, payload);
          },
          py::arg("sort"), py::kw_only(), py::arg("owner") = std::nullopt,
          py::arg("parent") = std::nullopt, py::arg("name") = std::nullopt,
          py::arg("payload") = std::nullopt, py::arg("id") = std::nullopt,
          "Add a node; returns its id (generated unless given)")
      .def("add_edge", &Network::add_edge, py::arg("source"), py::arg("label"),
           py::arg("target"), py::arg("weight"))
      .def("set_edge_weight", &Network::set_edge_weight, py::arg("source"), py::arg("label"),
           py::arg("target"), py::arg("weight"))
      .def("node_count", &Network::node_count)
      .def("edge_count", &Network::edge_count)
      .def("has_node", &Network::has_node)
      .def("ids_of_sort",
           [](const Network& net, const std::string& sort) { return net.ids_of_sort(sort_arg(sort)); })
      .def("solutions_of", &Network::solutions_of, py::arg("problem"))
      .def("domains_of", &Network::domains_of, py::arg("human"))
      .def(
          "out_edges",
          [](const Network& net, const NodeId& node, const std::set<std::string>& labels) {
            py::list out;
            for (const auto& e : net.out_edges(node, labels))
              out.append(py::make_tuple(e.label, e.target, e.weight));
            return out;
          },
          py::arg("node"), py::arg("labels"))
      .def("validate", [](const Network& net) {
        py::list out;
        for (const auto& v : net.validate()) {
          py::dict d;
          d["rule"] = v.rule;
          d["subject"] = v.subject;
          d["detail"] = v.detail;
          out.append(d);
        }
        return out;
      });

  py::class_<TraversalGrammar>(m, "Grammar")
      .def_property_readonly("name", &TraversalGrammar::name)
      .def("__str__", &serialize_grammar)
      .def("__eq__", [](const TraversalGrammar& a, const TraversalGrammar& b) { return a == b; });

  m.def("builtin_grammar", [](const std::string& name) { return builtin_grammar(name); },
        py::arg("name"));
  m.def("builtin_grammar_names", [] { return builtin_grammar_names(); });
  m.def("parse_grammar", [](const std::string& text) { return parse_grammar(text); },
        py::arg("text"));
  m.def("serialize_grammar", &serialize_grammar, py::arg("grammar"));

  m.def("load_scenario", &load_scenario, py::arg("json_text"));
  m.def("load_scenario_file", &load_scenario_file, py::arg("path"));
  m.def("save_scenario", &save_scenario, py::arg("network"));

  m.def(
      "rank_solutions",
      [](const Network& net, const NodeId& problem, const std::string& algorithm,
         std::optional<NodeId> dictator, const std::string& metric,
         const TraversalGrammar* grammar, const std::string& mode, std::uint64_t seed,
         int particles, std::optional<double> delta, std::optional<int> epochs,
         std::optional<double> eps_threshold, std::optional<double> tol,
         std::optional<double> prune, std::optional<int> step_cap, std::optional<int> threads,
         const std::string& uses) {
        Algorithm alg;
        if (algorithm == "dd") {
          alg = Algorithm::dd();
        } else if (algorithm == "rd") {
          alg = Algorithm::rd();
        } else if (algorithm == "ddd") {
          alg = Algorithm::ddd();
        } else if (algorithm == "dictator") {
          if (dictator) {
            alg = Algorithm::dictator_by_id(*dictator);
          } else if (metric == "eigenvector") {
            alg = Algorithm::dictator_by_metric(DictatorMetric::EigenvectorCentrality);
          } else {
            alg = Algorithm::dictator_by_metric(DictatorMetric::InDegreeTrusts);
          }
        } else if (algorithm == "custom") {
          if (!grammar) fail(Errc::InvalidConfig, "custom algorithm needs grammar=");
          alg = Algorithm::custom(*grammar);
        } else {
          fail(Errc::InvalidConfig, "unknown algorithm '" + algorithm + "'");
        }
        auto overrides = make_overrides(mode, seed, particles, delta, epochs, eps_threshold,
                                        tol, prune, step_cap, threads, uses);
        return rank_result_dict(rank_solutions(net, problem, alg, overrides));
      },
      py::arg("network"), py::arg("problem"), py::arg("algorithm") = "dd", py::kw_only(),
      py::arg("dictator") = std::nullopt, py::arg("metric") = "indegree",
      py::arg("grammar") = nullptr, py::arg("mode") = "det", py::arg("seed") = 0,
      py::arg("particles") = 100000, py::arg("delta") = std::nullopt,
      py::arg("epochs") = std::nullopt, py::arg("eps_threshold") = std::nullopt,
      py::arg("tol") = std::nullopt, py::arg("prune") = std::nullopt,
      py::arg("step_cap") = std::nullopt, py::arg("threads") = std::nullopt,
      py::arg("uses") = "recursive");

  m.def(
      "rank_domains",
      [](const Network& net, const NodeId& problem, const std::string& method,
         const std::string& mode, std::uint64_t seed, int particles, std::optional<double> delta,
         std::optional<int> threads) {
        if (method != "direct" && method != "recursive")
          fail(Errc::InvalidConfig, "method must be 'direct' or 'recursive'");
        auto overrides = make_overrides(mode, seed, particles, delta, std::nullopt, std::nullopt,
                                        std::nullopt, std::nullopt, std::nullopt, threads,
                                        "recursive");
        DomainRankResult r = rank_domains(
            net, problem, method == "direct" ? UsesMethod::Direct : UsesMethod::Recursive,
            overrides);
        py::dict d;
        d["domains"] = ranking_list(r.domains);
        py::list names;
        for (const auto& n : r.names) names.append(py::make_tuple(n.name, n.weight));
        d["names"] = names;
        d["epochs"] = r.run.epochs_run;
        d["converged"] = r.run.converged;
        return d;
      },
      py::arg("network"), py::arg("problem"), py::arg("method") = "recursive", py::kw_only(),
      py::arg("mode") = "det", py::arg("seed") = 0, py::arg("particles") = 100000,
      py::arg("delta") = std::nullopt, py::arg("threads") = std::nullopt);

  m.def(
      "compute_uses_weights",
      [](const Network& net, const NodeId& problem, const std::string& method) {
        if (method != "direct" && method != "recursive")
          fail(Errc::InvalidConfig, "method must be 'direct' or 'recursive'");
        return compute_uses_weights(
            net, problem, method == "direct" ? UsesMethod::Direct : UsesMethod::Recursive);
      },
      py::arg("network"), py::arg("problem"), py::arg("method") = "recursive");

  m.def(
      "select_dictator",
      [](const Network& net, const std::string& metric) {
        DictatorMetric dm;
        if (metric == "indegree") {
          dm = DictatorMetric::InDegreeTrusts;
        } else if (metric == "eigenvector") {
          dm = DictatorMetric::EigenvectorCentrality;
        } else {
          fail(Errc::InvalidConfig, "metric must be 'indegree' or 'eigenvector'");
        }
        DictatorChoice c = select_dictator(net, dm);
        py::dict d;
        d["dictator"] = c.dictator;
        d["tie"] = c.tie;
        d["tied"] = c.tied;
        return d;
      },
      py::arg("network"), py::arg("metric") = "indegree");

  m.def(
      "select_outcome",
      [](const Network& net, const std::vector<std::pair<NodeId, double>>& ranking,
         const std::string& rule) {
        std::map<NodeId, double> weights;
        for (const auto& [id, w] : ranking) weights[id] = w;
        Ranking r = make_ranking(weights);
        SelectionRule sel;
        if (rule == "plurality") {
          sel = SelectionRule::Plurality;
        } else if (rule == "average") {
          sel = SelectionRule::NumericAverage;
        } else {
          fail(Errc::InvalidConfig, "rule must be 'plurality' or 'average'");
        }
        Outcome o = select_outcome(r, sel, net);
        py::dict d;
        if (o.winner) d["winner"] = *o.winner;
        if (o.value) d["value"] = *o.value;
        d["tie"] = o.tie;
        return d;
      },
      py::arg("network"), py::arg("ranking"), py::arg("rule") = "plurality");
}
