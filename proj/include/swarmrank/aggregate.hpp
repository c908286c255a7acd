#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swarmrank/engine.hpp"
#include "swarmrank/grammar.hpp"
#include "swarmrank/graph.hpp"

namespace swarmrank {

enum class UsesMethod { Direct, Recursive };

enum class DictatorMetric { InDegreeTrusts, EigenvectorCentrality };

/// A named collective solution ranking algorithm.
struct Algorithm {
  enum class Kind { DD, RD, DDD, Dictator, Custom } kind = Kind::DD;
  std::optional<NodeId> dictator;            // Dictator: explicit id ...
  std::optional<DictatorMetric> metric;      // ... or a metric to derive one
  std::optional<TraversalGrammar> grammar;   // Custom

  static Algorithm dd() { return {Kind::DD, {}, {}, {}}; }
  static Algorithm rd() { return {Kind::RD, {}, {}, {}}; }
  static Algorithm ddd() { return {Kind::DDD, {}, {}, {}}; }
  static Algorithm dictator_by_id(NodeId id) { return {Kind::Dictator, std::move(id), {}, {}}; }
  static Algorithm dictator_by_metric(DictatorMetric m) { return {Kind::Dictator, {}, m, {}}; }
  static Algorithm custom(TraversalGrammar g) { return {Kind::Custom, {}, {}, std::move(g)}; }

  const char* name() const;
};

/// Descending weights; ties ordered and broken by NodeId. `ties` lists the
/// groups of ids whose weights are equal (within 1e-12 relative).
struct RankedEntry {
  NodeId id;
  double weight = 0.0;
};

struct Ranking {
  std::vector<RankedEntry> entries;
  std::vector<std::vector<NodeId>> ties;
};

Ranking make_ranking(const std::map<NodeId, double>& weights);

/// Knobs a caller may pin; anything unset falls back to the engine defaults
/// plus the per-grammar decay defaults (0 for dd/dictator, 0.15 otherwise).
struct EngineOverrides {
  std::optional<double> decay;
  std::optional<double> energy_threshold;
  std::optional<double> convergence_tolerance;
  std::optional<double> branch_prune_threshold;
  std::optional<int> max_epochs;
  std::optional<int> max_steps_per_particle;
  std::optional<bool> monte_carlo;
  std::optional<std::uint64_t> seed;
  std::optional<int> particles_per_source;
  std::optional<int> threads;
  UsesMethod uses_method = UsesMethod::Recursive;
};

struct SolutionRankResult {
  NodeId problem;
  std::string algorithm;
  Ranking ranking;
  RunResult run;
  std::optional<NodeId> dictator;  // resolved dictator, when applicable
  bool dictator_tie = false;
};

/// Ranks p_j(S) relative to the humans under the chosen algorithm. RD and
/// DDD materialize run-time uses weights first (multiple-domains networks);
/// on single-domain networks they run their trusts-only variants.
SolutionRankResult rank_solutions(const Network& net, const NodeId& problem,
                                  const Algorithm& algorithm,
                                  const EngineOverrides& overrides = {});

/// Run-time uses weights per (human, owned domain): self-categorizers get
/// their own categorizedAs weights, everyone else gets the collective
/// name-level domain ranking (zero where no name categorizes the problem).
using UsesWeights = std::map<NodeId, std::map<NodeId, double>>;
UsesWeights compute_uses_weights(const Network& net, const NodeId& problem, UsesMethod method,
                                 const EngineOverrides& overrides = {});

struct RankedName {
  std::string name;
  double weight = 0.0;
};

struct DomainRankResult {
  Ranking domains;                 // over the categorizing domains
  std::vector<RankedName> names;   // energy summed across same-named domains
  RunResult run;
};

/// Ranks all domains relative to `problem` (I = D, O = categorizing domains).
DomainRankResult rank_domains(const Network& net, const NodeId& problem, UsesMethod method,
                              const EngineOverrides& overrides = {});

struct DictatorChoice {
  NodeId dictator;
  bool tie = false;
  std::vector<NodeId> tied;  // everyone sharing the top score
};

DictatorChoice select_dictator(const Network& net, DictatorMetric metric);

enum class SelectionRule { Plurality, NumericAverage };

struct Outcome {
  std::optional<NodeId> winner;  // Plurality
  std::optional<double> value;   // NumericAverage
  bool tie = false;
};

Outcome select_outcome(const Ranking& ranking, SelectionRule rule, const Network& net);

/// Weights are printed at 12 significant digits everywhere.
std::string format_weight(double w);

} // namespace swarmrank
