#pragma once

// Independent expected-value oracle: enumerates every grammar-admissible
// weighted walk by direct recursion over the network, summing
// probability x (1-decay)^depth per visited node. The admissible-edge logic
// is hand-coded per built-in grammar here and shares nothing with the
// grammar/engine implementation it is used to check. Truncation (energy
// threshold, branch prune, step cap) follows the documented run semantics.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "swarmrank/graph.hpp"

namespace oracle {

using swarmrank::Edge;
using swarmrank::Network;
using swarmrank::NodeId;
using swarmrank::Sort;

struct Params {
  double decay = 0.15;
  double energy_threshold = 1e-6;
  double prune = 1e-12;
  int step_cap = 10000;
};

using Energies = std::map<NodeId, long double>;
using UsesMap = std::map<NodeId, std::map<NodeId, double>>;

struct Walker {
  const Network& net;
  std::string grammar;
  NodeId problem;
  std::set<NodeId> problem_solutions;
  const UsesMap* uses = nullptr;
  std::optional<NodeId> dictator;
  Params params;
  Energies energies;

  bool terminal(const NodeId& n) const {
    Sort s = net.node(n).sort;
    if (grammar == "domain_direct" || grammar == "domain_recursive") return s == Sort::Problem;
    return s == Sort::Solution;
  }

  bool voted_on_problem(const NodeId& human) const {
    for (const auto& e : net.edges())
      if (e.label == "votedOn" && e.source == human && e.weight > 0.0 &&
          problem_solutions.count(e.target))
        return true;
    return false;
  }

  std::vector<std::pair<NodeId, double>> labeled(const NodeId& n, const std::string& label) const {
    std::vector<std::pair<NodeId, double>> out;
    for (const auto& e : net.edges())
      if (e.source == n && e.label == label && e.weight > 0.0) out.emplace_back(e.target, e.weight);
    return out;
  }

  std::vector<std::pair<NodeId, double>> admissible(const NodeId& n) const {
    Sort s = net.node(n).sort;
    if (grammar == "dd") {
      return labeled(n, "votedOn");
    }
    if (grammar == "dictator") {
      if (!dictator || n != *dictator) return {};
      return labeled(n, "votedOn");
    }
    if (grammar == "rd" || grammar == "ddd") {
      if (s == Sort::Human) {
        auto votes = labeled(n, "votedOn");
        if (!votes.empty()) return votes;
        std::vector<std::pair<NodeId, double>> out;
        if (uses) {
          auto it = uses->find(n);
          if (it != uses->end())
            for (const auto& [d, w] : it->second)
              if (w > 0.0) out.emplace_back(d, w);
        }
        return out;
      }
      if (s == Sort::Domain) {
        std::vector<std::pair<NodeId, double>> trusted;
        for (const auto& [h, w] : labeled(n, "trusts"))
          if (grammar == "ddd" || voted_on_problem(h)) trusted.emplace_back(h, w);
        if (!trusted.empty()) return trusted;
        return labeled(n, "similarTo");
      }
      return {};
    }
    if (grammar == "rd_single" || grammar == "ddd_single") {
      auto votes = labeled(n, "votedOn");
      if (!votes.empty()) return votes;
      std::vector<std::pair<NodeId, double>> trusted;
      for (const auto& [h, w] : labeled(n, "trusts"))
        if (grammar == "ddd_single" || voted_on_problem(h)) trusted.emplace_back(h, w);
      return trusted;
    }
    if (grammar == "domain_direct" || grammar == "domain_recursive") {
      std::vector<std::pair<NodeId, double>> cat;
      for (const auto& [t, w] : labeled(n, "categorizedAs"))
        if (t == problem) cat.emplace_back(t, w);
      if (!cat.empty()) return cat;
      if (grammar == "domain_recursive") return labeled(n, "similarTo");
      return {};
    }
    return {};
  }

  void visit(const NodeId& n, double prob, double energy, int depth) {
    energies[n] += static_cast<long double>(prob) * energy;
    if (terminal(n)) return;
    auto edges = admissible(n);
    if (edges.empty()) return;
    double e_next = energy * (1.0 - params.decay);
    if (e_next < params.energy_threshold) return;
    if (depth + 1 > params.step_cap) return;
    double total = 0.0;
    for (const auto& [t, w] : edges) total += w;
    for (const auto& [t, w] : edges) {
      double p = prob * (w / total);
      if (p * e_next < params.prune) continue;
      visit(t, p, e_next, depth + 1);
    }
  }
};

inline Energies walk_energies(const Network& net, const std::string& grammar,
                              const NodeId& problem, const std::vector<NodeId>& inputs,
                              const UsesMap* uses, const std::optional<NodeId>& dictator,
                              const Params& params) {
  Walker w{net, grammar, problem, {}, uses, dictator, params, {}};
  for (const auto& s : net.solutions_of(problem)) w.problem_solutions.insert(s);
  for (const auto& src : inputs) w.visit(src, 1.0, 1.0, 0);
  return w.energies;
}

inline std::map<NodeId, double> normalize_over(const Energies& e,
                                               const std::vector<NodeId>& outputs) {
  long double total = 0.0L;
  for (const auto& id : outputs) {
    auto it = e.find(id);
    if (it != e.end()) total += it->second;
  }
  std::map<NodeId, double> out;
  for (const auto& id : outputs) {
    auto it = e.find(id);
    out[id] = (total > 0.0L && it != e.end()) ? static_cast<double>(it->second / total) : 0.0;
  }
  return out;
}

/// Collective solution ranking over p(S).
inline std::map<NodeId, double> rank_solutions(const Network& net, const std::string& grammar,
                                               const NodeId& problem, const UsesMap* uses,
                                               const std::optional<NodeId>& dictator,
                                               const Params& params) {
  std::vector<NodeId> inputs =
      dictator ? std::vector<NodeId>{*dictator} : net.ids_of_sort(Sort::Human);
  Energies e = walk_energies(net, grammar, problem, inputs, uses, dictator, params);
  return normalize_over(e, net.solutions_of(problem));
}

struct DomainRanking {
  std::map<NodeId, double> domains;
  std::map<std::string, double> names;
};

inline std::vector<NodeId> categorizing_domains(const Network& net, const NodeId& problem) {
  std::vector<NodeId> out;
  for (const auto& d : net.ids_of_sort(Sort::Domain))
    for (const auto& e : net.edges())
      if (e.label == "categorizedAs" && e.source == d && e.target == problem) {
        out.push_back(d);
        break;
      }
  return out;
}

inline DomainRanking rank_domains(const Network& net, const NodeId& problem, bool recursive,
                                  const Params& params) {
  DomainRanking result;
  std::vector<NodeId> outputs = categorizing_domains(net, problem);
  if (outputs.empty()) return result;
  Energies e = walk_energies(net, recursive ? "domain_recursive" : "domain_direct", problem,
                             net.ids_of_sort(Sort::Domain), nullptr, std::nullopt, params);
  result.domains = normalize_over(e, outputs);

  std::set<std::string> names;
  for (const auto& d : outputs)
    if (net.node(d).name) names.insert(*net.node(d).name);
  std::map<std::string, long double> name_energy;
  for (const auto& n : names) name_energy[n] = 0.0L;
  for (const auto& d : net.ids_of_sort(Sort::Domain)) {
    const auto& name = net.node(d).name;
    if (!name || !names.count(*name)) continue;
    auto it = e.find(d);
    if (it != e.end()) name_energy[*name] += it->second;
  }
  long double total = 0.0L;
  for (const auto& [n, v] : name_energy) total += v;
  for (const auto& [n, v] : name_energy)
    result.names[n] = total > 0.0L ? static_cast<double>(v / total) : 0.0;
  return result;
}

/// The two uses-weight equations, computed from scratch.
inline UsesMap uses_weights(const Network& net, const NodeId& problem, bool recursive,
                            const Params& params) {
  UsesMap out;
  std::map<std::string, double> name_weight;
  bool names_ready = false;
  for (const auto& h : net.ids_of_sort(Sort::Human)) {
    auto& mine = out[h];
    bool self = false;
    for (const auto& d : net.domains_of(h)) {
      double w = 0.0;
      bool found = false;
      for (const auto& e : net.edges())
        if (e.label == "categorizedAs" && e.source == d && e.target == problem) {
          w = e.weight;
          found = true;
        }
      mine[d] = w;
      if (found) self = true;
    }
    if (self) continue;
    if (!names_ready) {
      name_weight = rank_domains(net, problem, recursive, params).names;
      names_ready = true;
    }
    for (const auto& d : net.domains_of(h)) {
      const auto& name = net.node(d).name;
      auto it = name ? name_weight.find(*name) : name_weight.end();
      mine[d] = it == name_weight.end() ? 0.0 : it->second;
    }
  }
  return out;
}

} // namespace oracle
