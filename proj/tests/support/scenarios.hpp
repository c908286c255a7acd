#pragma once

// Shared scenario builders and random-network generation for the test
// suites. Weights are small rationals (k / denom) so expected values can be
// stated exactly.

#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "swarmrank/graph.hpp"

namespace testsup {

using namespace swarmrank;

/// One human, two solutions, votedOn weights 0.6 / 0.4.
inline Network single_voter_two_solutions() {
  Network net;
  net.add_node_with_id("h1", Sort::Human);
  net.add_node_with_id("p0", Sort::Problem);
  net.add_node_with_id("s1", Sort::Solution, NodeId("p0"));
  net.add_node_with_id("s2", Sort::Solution, NodeId("p0"));
  net.add_edge("p0", "hasProposed", "s1", 1.0);
  net.add_edge("p0", "hasProposed", "s2", 1.0);
  net.add_edge("h1", "votedOn", "s1", 0.6);
  net.add_edge("h1", "votedOn", "s2", 0.4);
  return net;
}

/// Single-domain trust chain: h0 -> h1 -> h2 (votes s1); h3 votes s2.
inline Network trust_chain_single_domain() {
  Network net{Schema::core(SchemaMode::SingleDomain)};
  for (const char* h : {"h0", "h1", "h2", "h3"}) net.add_node_with_id(h, Sort::Human);
  net.add_node_with_id("p0", Sort::Problem);
  net.add_node_with_id("s1", Sort::Solution, NodeId("p0"));
  net.add_node_with_id("s2", Sort::Solution, NodeId("p0"));
  net.add_edge("h0", "trusts", "h1", 1.0);
  net.add_edge("h1", "trusts", "h2", 1.0);
  net.add_edge("h2", "votedOn", "s1", 1.0);
  net.add_edge("h3", "votedOn", "s2", 1.0);
  return net;
}

/// h0 delegates through its categorizing domain to voting h1; h2 votes s2.
inline Network rd_delegation() {
  Network net;
  for (const char* h : {"h0", "h1", "h2"}) net.add_node_with_id(h, Sort::Human);
  net.add_node_with_id("d0", Sort::Domain, NodeId("h0"), std::string("A"));
  net.add_node_with_id("p0", Sort::Problem);
  net.add_node_with_id("s1", Sort::Solution, NodeId("p0"));
  net.add_node_with_id("s2", Sort::Solution, NodeId("p0"));
  net.add_edge("d0", "categorizedAs", "p0", 1.0);
  net.add_edge("d0", "trusts", "h1", 1.0);
  net.add_edge("h1", "votedOn", "s1", 1.0);
  net.add_edge("h2", "votedOn", "s2", 1.0);
  return net;
}

/// The 0.60 / 0.40 self-categorization scenario.
inline Network self_categorizer() {
  Network net;
  net.add_node_with_id("h0", Sort::Human);
  net.add_node_with_id("d1", Sort::Domain, NodeId("h0"), std::string("A"));
  net.add_node_with_id("d2", Sort::Domain, NodeId("h0"), std::string("B"));
  net.add_node_with_id("p0", Sort::Problem);
  net.add_node_with_id("s0", Sort::Solution, NodeId("p0"));
  net.add_edge("d1", "categorizedAs", "p0", 0.60);
  net.add_edge("d2", "categorizedAs", "p0", 0.40);
  return net;
}

/// d2 -similarTo-> d1 -categorizedAs-> p0; recursive ranking doubles d1.
inline Network domain_chain() {
  Network net;
  net.add_node_with_id("h0", Sort::Human);
  net.add_node_with_id("d1", Sort::Domain, NodeId("h0"), std::string("A"));
  net.add_node_with_id("d2", Sort::Domain, NodeId("h0"), std::string("B"));
  net.add_node_with_id("p0", Sort::Problem);
  net.add_node_with_id("s0", Sort::Solution, NodeId("p0"));
  net.add_edge("d1", "categorizedAs", "p0", 1.0);
  net.add_edge("d2", "similarTo", "d1", 1.0);
  return net;
}

// --- random networks -----------------------------------------------------

struct RandomSpec {
  int humans = 4;
  int solutions = 3;
  int max_domains_per_human = 2;   // multiple-domains mode only
  double vote_prob = 0.6;
  double multi_vote_prob = 0.5;    // voters: chance of voting on >1 solution
  double categorize_prob = 0.5;    // per domain
  double trust_prob = 0.7;         // per domain (or human in single-domain)
  double similar_prob = 0.4;       // per domain
  bool single_domain = false;
  bool ensure_voter = true;
  int weight_denom = 16;
};

struct RandomScenario {
  Network net;
  NodeId problem;
  std::vector<NodeId> voters;
  std::vector<NodeId> humans;
};

inline double rational_weight(std::mt19937_64& rng, int denom) {
  std::uniform_int_distribution<int> num(1, denom);
  return static_cast<double>(num(rng)) / static_cast<double>(denom);
}

inline RandomScenario random_scenario(std::mt19937_64& rng, const RandomSpec& spec) {
  RandomScenario sc{Network{Schema::core(spec.single_domain ? SchemaMode::SingleDomain
                                                            : SchemaMode::MultipleDomains)},
                    "p0",
                    {},
                    {}};
  Network& net = sc.net;
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  for (int i = 0; i < spec.humans; ++i)
    sc.humans.push_back(net.add_node_with_id("h" + std::to_string(i), Sort::Human));
  net.add_node_with_id("p0", Sort::Problem);
  std::vector<NodeId> sols;
  for (int i = 0; i < spec.solutions; ++i) {
    NodeId s = net.add_node_with_id("s" + std::to_string(i), Sort::Solution, NodeId("p0"),
                                    std::nullopt, static_cast<double>(10 * (i + 1)));
    net.add_edge("p0", "hasProposed", s, 1.0);
    sols.push_back(s);
  }

  auto vote = [&](const NodeId& h) {
    std::uniform_int_distribution<std::size_t> pick(0, sols.size() - 1);
    std::set<std::size_t> chosen{pick(rng)};
    while (coin(rng) < spec.multi_vote_prob && chosen.size() < sols.size()) chosen.insert(pick(rng));
    for (auto k : chosen)
      net.add_edge(h, "votedOn", sols[k], rational_weight(rng, spec.weight_denom));
    sc.voters.push_back(h);
  };
  for (const auto& h : sc.humans)
    if (coin(rng) < spec.vote_prob) vote(h);
  if (spec.ensure_voter && sc.voters.empty()) vote(sc.humans.front());

  std::uniform_int_distribution<std::size_t> pick_human(0, sc.humans.size() - 1);
  if (spec.single_domain) {
    for (const auto& h : sc.humans) {
      if (coin(rng) >= spec.trust_prob) continue;
      NodeId other = sc.humans[pick_human(rng)];
      if (other == h) continue;
      net.add_edge(h, "trusts", other, rational_weight(rng, spec.weight_denom));
    }
    return sc;
  }

  const std::vector<std::string> names = {"A", "B", "C"};
  std::vector<NodeId> domains;
  for (std::size_t hi = 0; hi < sc.humans.size(); ++hi) {
    std::uniform_int_distribution<int> count(0, spec.max_domains_per_human);
    int k = count(rng);
    for (int d = 0; d < k; ++d) {
      NodeId id = "d" + std::to_string(hi) + "_" + std::to_string(d);
      net.add_node_with_id(id, Sort::Domain, sc.humans[hi], names[d % names.size()]);
      domains.push_back(id);
    }
  }
  for (const auto& d : domains) {
    if (coin(rng) < spec.categorize_prob)
      net.add_edge(d, "categorizedAs", "p0", rational_weight(rng, spec.weight_denom));
    if (coin(rng) < spec.trust_prob)
      net.add_edge(d, "trusts", sc.humans[pick_human(rng)], rational_weight(rng, spec.weight_denom));
    if (domains.size() > 1 && coin(rng) < spec.similar_prob) {
      std::uniform_int_distribution<std::size_t> pick_domain(0, domains.size() - 1);
      NodeId other = domains[pick_domain(rng)];
      if (other != d) net.add_edge(d, "similarTo", other, rational_weight(rng, spec.weight_denom));
    }
  }
  return sc;
}

} // namespace testsup
