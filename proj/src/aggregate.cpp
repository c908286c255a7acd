#include "swarmrank/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace swarmrank {

const char* Algorithm::name() const {
  switch (kind) {
    case Kind::DD: return "dd";
    case Kind::RD: return "rd";
    case Kind::DDD: return "ddd";
    case Kind::Dictator: return "dictator";
    case Kind::Custom: return "custom";
  }
  return "?";
}

std::string format_weight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", w);
  return buf;
}

namespace {

constexpr double kTieEps = 1e-12;

bool weights_tie(double a, double b) {
  double scale = std::max(1.0, std::max(std::fabs(a), std::fabs(b)));
  return std::fabs(a - b) <= kTieEps * scale;
}

SwarmConfig base_config(const TraversalGrammar& g, const EngineOverrides& o) {
  SwarmConfig cfg;
  bool short_walk = g.name() == "dd" || g.name() == "dictator";
  cfg.decay = o.decay.value_or(short_walk ? 0.0 : 0.15);
  if (o.energy_threshold) cfg.energy_threshold = *o.energy_threshold;
  if (o.convergence_tolerance) cfg.convergence_tolerance = *o.convergence_tolerance;
  if (o.max_epochs) cfg.max_epochs = *o.max_epochs;
  if (o.max_steps_per_particle) cfg.max_steps_per_particle = *o.max_steps_per_particle;
  if (o.threads) cfg.threads = *o.threads;
  if (o.monte_carlo.value_or(false)) {
    MonteCarloMode mc;
    if (o.seed) mc.seed = *o.seed;
    if (o.particles_per_source) mc.particles_per_source = *o.particles_per_source;
    cfg.mode = mc;
  } else {
    DeterministicMode det;
    if (o.branch_prune_threshold) det.branch_prune_threshold = *o.branch_prune_threshold;
    cfg.mode = det;
  }
  return cfg;
}

const Node& require_problem(const Network& net, const NodeId& problem) {
  if (!net.has_node(problem)) fail(Errc::UnknownProblem, "no node '" + problem + "'");
  const Node& p = net.node(problem);
  if (p.sort != Sort::Problem) fail(Errc::UnknownProblem, "'" + problem + "' is not a problem");
  return p;
}

} // namespace

Ranking make_ranking(const std::map<NodeId, double>& weights) {
  Ranking r;
  for (const auto& [id, w] : weights) r.entries.push_back(RankedEntry{id, w});
  // map order gives ascending ids; stable sort keeps that order inside ties
  std::stable_sort(r.entries.begin(), r.entries.end(),
                   [](const RankedEntry& a, const RankedEntry& b) { return a.weight > b.weight; });
  std::size_t i = 0;
  while (i < r.entries.size()) {
    std::size_t j = i + 1;
    while (j < r.entries.size() && weights_tie(r.entries[i].weight, r.entries[j].weight)) ++j;
    if (j - i >= 2) {
      std::vector<NodeId> group;
      for (std::size_t k = i; k < j; ++k) group.push_back(r.entries[k].id);
      r.ties.push_back(std::move(group));
    }
    i = j;
  }
  return r;
}

UsesWeights compute_uses_weights(const Network& net, const NodeId& problem, UsesMethod method,
                                 const EngineOverrides& overrides) {
  require_problem(net, problem);

  auto categorization_weight = [&](const NodeId& domain) -> std::optional<double> {
    for (std::uint32_t ei : net.out_edge_indices(net.index_of(domain), "categorizedAs")) {
      const Edge& e = net.edge_at(ei);
      if (e.target == problem) return e.weight;
    }
    return std::nullopt;
  };

  UsesWeights uses;
  std::vector<NodeId> non_categorizers;
  for (const auto& h : net.ids_of_sort(Sort::Human)) {
    auto& mine = uses[h];
    bool self = false;
    for (const auto& d : net.domains_of(h)) {
      auto w = categorization_weight(d);
      mine[d] = w.value_or(0.0);
      if (w) self = true;
    }
    if (!self) non_categorizers.push_back(h);
  }

  if (!non_categorizers.empty()) {
    std::map<std::string, double> name_weight;
    try {
      EngineOverrides det = overrides;
      det.monte_carlo = false;  // uses weights are derived values, never sampled
      DomainRankResult collective = rank_domains(net, problem, method, det);
      for (const auto& n : collective.names) name_weight[n.name] = n.weight;
    } catch (const Error& e) {
      if (e.code() != Errc::NoCategorizations) throw;
      // nobody categorized the problem: every non-categorizer keeps zeros
    }
    for (const auto& h : non_categorizers) {
      auto& mine = uses[h];
      for (const auto& d : net.domains_of(h)) {
        const auto& name = net.node(d).name;
        auto it = name ? name_weight.find(*name) : name_weight.end();
        mine[d] = it == name_weight.end() ? 0.0 : it->second;
      }
    }
  }
  return uses;
}

DomainRankResult rank_domains(const Network& net, const NodeId& problem, UsesMethod method,
                              const EngineOverrides& overrides) {
  require_problem(net, problem);

  std::vector<NodeId> inputs = net.ids_of_sort(Sort::Domain);
  std::vector<NodeId> outputs;
  for (const auto& d : inputs) {
    for (std::uint32_t ei : net.out_edge_indices(net.index_of(d), "categorizedAs")) {
      if (net.edge_at(ei).target == problem) {
        outputs.push_back(d);
        break;
      }
    }
  }
  if (outputs.empty())
    fail(Errc::NoCategorizations, "no domain categorizes problem '" + problem + "'");

  const TraversalGrammar& g =
      builtin_grammar(method == UsesMethod::Direct ? "domain_direct" : "domain_recursive");
  SwarmConfig cfg = base_config(g, overrides);
  cfg.inputs = inputs;
  cfg.outputs = outputs;
  cfg.context = TraversalContext::for_problem(net, problem);

  DomainRankResult result;
  result.run = run(net, g, cfg);
  result.domains = make_ranking(result.run.ranking);

  // name-level aggregate: sum raw energy across same-named domains for every
  // name that categorizes the problem, then normalize
  std::set<std::string> categorizing_names;
  for (const auto& d : outputs) {
    const auto& name = net.node(d).name;
    if (name) categorizing_names.insert(*name);
  }
  std::map<std::string, double> name_energy;
  for (const auto& name : categorizing_names) name_energy[name] = 0.0;
  for (const auto& [id, e] : result.run.raw_energy) {
    const Node& n = net.node(id);
    if (n.sort != Sort::Domain || !n.name) continue;
    auto it = name_energy.find(*n.name);
    if (it != name_energy.end()) it->second += e;
  }
  double total = 0.0;
  for (const auto& [name, e] : name_energy) total += e;
  for (const auto& [name, e] : name_energy)
    result.names.push_back(RankedName{name, total > 0.0 ? e / total : 0.0});
  std::stable_sort(result.names.begin(), result.names.end(),
                   [](const RankedName& a, const RankedName& b) { return a.weight > b.weight; });
  return result;
}

SolutionRankResult rank_solutions(const Network& net, const NodeId& problem,
                                  const Algorithm& algorithm, const EngineOverrides& overrides) {
  require_problem(net, problem);
  std::vector<NodeId> outputs = net.solutions_of(problem);
  if (outputs.empty())
    fail(Errc::UnknownProblem, "problem '" + problem + "' has no solutions");

  const bool multi = net.schema().mode() == SchemaMode::MultipleDomains;
  const TraversalGrammar* g = nullptr;
  switch (algorithm.kind) {
    case Algorithm::Kind::DD: g = &builtin_grammar("dd"); break;
    case Algorithm::Kind::RD: g = &builtin_grammar(multi ? "rd" : "rd_single"); break;
    case Algorithm::Kind::DDD: g = &builtin_grammar(multi ? "ddd" : "ddd_single"); break;
    case Algorithm::Kind::Dictator: g = &builtin_grammar("dictator"); break;
    case Algorithm::Kind::Custom:
      if (!algorithm.grammar) fail(Errc::InvalidConfig, "custom algorithm needs a grammar");
      g = &*algorithm.grammar;
      break;
  }

  SolutionRankResult result;
  result.problem = problem;
  result.algorithm = algorithm.kind == Algorithm::Kind::Custom ? g->name() : algorithm.name();

  SwarmConfig cfg = base_config(*g, overrides);
  cfg.outputs = outputs;
  cfg.context = TraversalContext::for_problem(net, problem);

  if (algorithm.kind == Algorithm::Kind::Dictator) {
    NodeId dictator;
    if (algorithm.dictator) {
      dictator = *algorithm.dictator;
      if (!net.has_node(dictator)) fail(Errc::UnknownNode, "no node '" + dictator + "'");
      if (net.node(dictator).sort != Sort::Human)
        fail(Errc::WrongReferentSort, "dictator '" + dictator + "' is not a human");
    } else {
      DictatorChoice choice =
          select_dictator(net, algorithm.metric.value_or(DictatorMetric::InDegreeTrusts));
      dictator = choice.dictator;
      result.dictator_tie = choice.tie;
    }
    result.dictator = dictator;
    cfg.inputs = {dictator};
    cfg.context.node_sets["dictators"] = {dictator};
  } else {
    const Sort start_sort = g->state(g->start_state()).sort;
    cfg.inputs = net.ids_of_sort(start_sort);
  }

  // run-time uses layer for the representative grammars
  if (multi && g->references_label("uses")) {
    UsesWeights uses = compute_uses_weights(net, problem, overrides.uses_method, overrides);
    std::map<NodeId, std::vector<std::pair<NodeId, double>>> layer;
    for (const auto& [h, per_domain] : uses) {
      auto& v = layer[h];
      for (const auto& [d, w] : per_domain) v.emplace_back(d, w);
    }
    cfg.context.uses_edges = std::move(layer);
  }

  result.run = run(net, *g, cfg);
  result.ranking = make_ranking(result.run.ranking);
  return result;
}

DictatorChoice select_dictator(const Network& net, DictatorMetric metric) {
  std::vector<NodeId> humans = net.ids_of_sort(Sort::Human);
  if (humans.empty()) fail(Errc::NoHumans, "network has no human nodes");

  std::map<NodeId, double> score;
  for (const auto& h : humans) score[h] = 0.0;

  const bool multi = net.schema().mode() == SchemaMode::MultipleDomains;
  auto truster_of = [&](const Edge& e) -> std::optional<NodeId> {
    if (!multi) return e.source;
    const Node& d = net.node(e.source);
    return d.owner;  // trusts edges originate at owned domains
  };

  if (metric == DictatorMetric::InDegreeTrusts) {
    for (const auto& e : net.edges()) {
      if (e.label != "trusts" || e.weight <= 0.0) continue;
      auto it = score.find(e.target);
      if (it != score.end()) it->second += 1.0;
    }
  } else {
    // eigenvector centrality by power iteration on the human-human trusts
    // projection (weights summed across the truster's domains)
    std::map<NodeId, std::size_t> hindex;
    for (std::size_t i = 0; i < humans.size(); ++i) hindex[humans[i]] = i;
    std::vector<std::vector<std::pair<std::size_t, double>>> out(humans.size());
    for (const auto& e : net.edges()) {
      if (e.label != "trusts" || e.weight <= 0.0) continue;
      auto truster = truster_of(e);
      if (!truster) continue;
      auto si = hindex.find(*truster);
      auto ti = hindex.find(e.target);
      if (si == hindex.end() || ti == hindex.end()) continue;
      out[si->second].emplace_back(ti->second, e.weight);
    }
    std::vector<double> x(humans.size(), 1.0 / static_cast<double>(humans.size()));
    std::vector<double> y(humans.size());
    for (int iter = 0; iter < 10000; ++iter) {
      std::fill(y.begin(), y.end(), 0.0);
      for (std::size_t i = 0; i < humans.size(); ++i)
        for (const auto& [j, w] : out[i]) y[j] += x[i] * w;
      double total = 0.0;
      for (double v : y) total += v;
      if (total <= 0.0) {
        std::fill(y.begin(), y.end(), 0.0);
        x = y;
        break;
      }
      double diff = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        y[j] /= total;
        diff += std::fabs(y[j] - x[j]);
      }
      x = y;
      if (diff <= 1e-10) break;
    }
    for (std::size_t i = 0; i < humans.size(); ++i) score[humans[i]] = x[i];
  }

  double best = -1.0;
  for (const auto& [id, s] : score) best = std::max(best, s);
  const double eps = metric == DictatorMetric::InDegreeTrusts ? 0.0 : 1e-9;
  DictatorChoice choice;
  for (const auto& [id, s] : score)
    if (s >= best - eps) choice.tied.push_back(id);
  choice.dictator = choice.tied.front();  // map order: smallest NodeId
  choice.tie = choice.tied.size() > 1;
  return choice;
}

Outcome select_outcome(const Ranking& ranking, SelectionRule rule, const Network& net) {
  if (ranking.entries.empty()) fail(Errc::InvalidConfig, "cannot select from an empty ranking");
  Outcome out;
  if (rule == SelectionRule::Plurality) {
    const RankedEntry& top = ranking.entries.front();
    out.winner = top.id;
    out.tie = ranking.entries.size() > 1 && weights_tie(top.weight, ranking.entries[1].weight);
  } else {
    double value = 0.0;
    for (const auto& entry : ranking.entries) {
      const Node& n = net.node(entry.id);
      if (!n.payload)
        fail(Errc::MissingPayload, "solution '" + entry.id + "' has no numeric payload");
      value += entry.weight * *n.payload;
    }
    out.value = value;
  }
  return out;
}

} // namespace swarmrank
