#include "swarmrank/grammar.hpp"

#include <algorithm>

namespace swarmrank {

TraversalGrammar::TraversalGrammar(std::string name, std::vector<GrammarState> states,
                                   std::string start_state, std::set<Sort> terminal_sorts)
    : name_(std::move(name)),
      states_(std::move(states)),
      start_state_(std::move(start_state)),
      terminal_sorts_(std::move(terminal_sorts)) {
  if (states_.empty()) fail(Errc::DanglingState, "grammar '" + name_ + "' declares no states");
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!by_id_.emplace(states_[i].id, i).second)
      fail(Errc::SyntaxError, "duplicate state '" + states_[i].id + "'");
  }
  if (!by_id_.count(start_state_))
    fail(Errc::DanglingState, "start state '" + start_state_ + "' is not declared");
  for (const auto& s : states_)
    for (const auto& r : s.rules)
      if (!by_id_.count(r.next_state))
        fail(Errc::DanglingState, "state '" + s.id + "' references undeclared state '" +
                                      r.next_state + "'");
}

const GrammarState& TraversalGrammar::state(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) fail(Errc::DanglingState, "no state '" + id + "'");
  return states_[it->second];
}

std::size_t TraversalGrammar::state_index(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) fail(Errc::DanglingState, "no state '" + id + "'");
  return it->second;
}

bool TraversalGrammar::references_label(const std::string& label) const {
  for (const auto& s : states_)
    for (const auto& r : s.rules)
      if (r.label == label) return true;
  return false;
}

namespace {

EdgeGuard voted_guard() { return EdgeGuard{GuardKind::TargetHasVotedOn, ""}; }
EdgeGuard current_in(std::string set) { return EdgeGuard{GuardKind::CurrentInSet, std::move(set)}; }
EdgeGuard target_in(std::string set) { return EdgeGuard{GuardKind::TargetInSet, std::move(set)}; }

TraversalGrammar make_dd() {
  return TraversalGrammar(
      "dd",
      {GrammarState{"Human", Sort::Human, {Rule{"votedOn", {}, "Solution"}}},
       GrammarState{"Solution", Sort::Solution, {}}},
      "Human", {Sort::Solution});
}

TraversalGrammar make_rd() {
  return TraversalGrammar(
      "rd",
      {GrammarState{"Human", Sort::Human,
                    {Rule{"votedOn", {}, "Solution"}, Rule{"uses", {}, "Domain"}}},
       GrammarState{"Domain", Sort::Domain,
                    {Rule{"trusts", voted_guard(), "Human"}, Rule{"similarTo", {}, "Domain"}}},
       GrammarState{"Solution", Sort::Solution, {}}},
      "Human", {Sort::Solution});
}

TraversalGrammar make_ddd() {
  // recursive representation: trusted humans need not have voted
  return TraversalGrammar(
      "ddd",
      {GrammarState{"Human", Sort::Human,
                    {Rule{"votedOn", {}, "Solution"}, Rule{"uses", {}, "Domain"}}},
       GrammarState{"Domain", Sort::Domain,
                    {Rule{"trusts", {}, "Human"}, Rule{"similarTo", {}, "Domain"}}},
       GrammarState{"Solution", Sort::Solution, {}}},
      "Human", {Sort::Solution});
}

TraversalGrammar make_dictator() {
  return TraversalGrammar(
      "dictator",
      {GrammarState{"Human", Sort::Human,
                    {Rule{"votedOn", current_in("dictators"), "Solution"}}},
       GrammarState{"Solution", Sort::Solution, {}}},
      "Human", {Sort::Solution});
}

TraversalGrammar make_domain_direct() {
  return TraversalGrammar(
      "domain_direct",
      {GrammarState{"Domain", Sort::Domain,
                    {Rule{"categorizedAs", target_in("problem"), "Problem"}}},
       GrammarState{"Problem", Sort::Problem, {}}},
      "Domain", {Sort::Problem});
}

TraversalGrammar make_domain_recursive() {
  return TraversalGrammar(
      "domain_recursive",
      {GrammarState{"Domain", Sort::Domain,
                    {Rule{"categorizedAs", target_in("problem"), "Problem"},
                     Rule{"similarTo", {}, "Domain"}}},
       GrammarState{"Problem", Sort::Problem, {}}},
      "Domain", {Sort::Problem});
}

TraversalGrammar make_rd_single() {
  return TraversalGrammar(
      "rd_single",
      {GrammarState{"Human", Sort::Human,
                    {Rule{"votedOn", {}, "Solution"}, Rule{"trusts", voted_guard(), "Human"}}},
       GrammarState{"Solution", Sort::Solution, {}}},
      "Human", {Sort::Solution});
}

TraversalGrammar make_ddd_single() {
  return TraversalGrammar(
      "ddd_single",
      {GrammarState{"Human", Sort::Human,
                    {Rule{"votedOn", {}, "Solution"}, Rule{"trusts", {}, "Human"}}},
       GrammarState{"Solution", Sort::Solution, {}}},
      "Human", {Sort::Solution});
}

} // namespace

const std::vector<std::string>& builtin_grammar_names() {
  static const std::vector<std::string> names = {"dd",          "rd",
                                                 "ddd",         "dictator",
                                                 "domain_direct", "domain_recursive",
                                                 "rd_single",   "ddd_single"};
  return names;
}

const TraversalGrammar& builtin_grammar(const std::string& name) {
  static const std::map<std::string, TraversalGrammar> all = [] {
    std::map<std::string, TraversalGrammar> m;
    m.emplace("dd", make_dd());
    m.emplace("rd", make_rd());
    m.emplace("ddd", make_ddd());
    m.emplace("dictator", make_dictator());
    m.emplace("domain_direct", make_domain_direct());
    m.emplace("domain_recursive", make_domain_recursive());
    m.emplace("rd_single", make_rd_single());
    m.emplace("ddd_single", make_ddd_single());
    return m;
  }();
  auto it = all.find(name);
  if (it == all.end()) fail(Errc::UnknownGrammar, "no built-in grammar '" + name + "'");
  return it->second;
}

TraversalContext TraversalContext::for_problem(const Network& net, const NodeId& problem) {
  const Node& p = net.node(problem);
  if (p.sort != Sort::Problem) fail(Errc::UnknownProblem, "'" + problem + "' is not a problem");
  TraversalContext ctx;
  ctx.problem = problem;
  for (const auto& s : net.solutions_of(problem)) ctx.problem_solutions.insert(s);
  ctx.node_sets["problem"] = {problem};
  return ctx;
}

const std::set<NodeId>& TraversalContext::named_set(const std::string& name) const {
  auto it = node_sets.find(name);
  if (it == node_sets.end())
    fail(Errc::InvalidConfig, "traversal context has no node set '" + name + "'");
  return it->second;
}

bool guard_passes(const EdgeGuard& guard, const Network& net, const TraversalContext& ctx,
                  const NodeId& current, const NodeId& target) {
  switch (guard.kind) {
    case GuardKind::None:
      return true;
    case GuardKind::TargetHasVotedOn: {
      if (!ctx.problem)
        fail(Errc::InvalidConfig, "TargetHasVotedOn guard requires an active problem");
      std::set<NodeIndex> sols;
      for (const auto& s : ctx.problem_solutions) sols.insert(net.index_of(s));
      return net.has_voted_on(net.index_of(target), sols);
    }
    case GuardKind::CurrentInSet:
      return ctx.named_set(guard.set_name).count(current) > 0;
    case GuardKind::TargetInSet:
      return ctx.named_set(guard.set_name).count(target) > 0;
  }
  return false;
}

Admissible admissible_edges(const TraversalGrammar& g, const std::string& state_id,
                            const NodeId& node_id, const Network& net,
                            const TraversalContext& ctx) {
  const GrammarState& st = g.state(state_id);
  const Node& n = net.node(node_id);
  if (n.sort != st.sort)
    fail(Errc::SortMismatch, "state '" + state_id + "' applies to " + sort_name(st.sort) +
                                 " nodes, but '" + node_id + "' is a " + sort_name(n.sort));
  for (std::size_t i = 0; i < st.rules.size(); ++i) {
    const Rule& rule = st.rules[i];
    std::vector<OutEdge> r;
    if (rule.label == "uses" && ctx.uses_edges) {
      // the run-time layer replaces stored uses edges entirely
      auto it = ctx.uses_edges->find(node_id);
      if (it != ctx.uses_edges->end()) {
        for (const auto& [target, w] : it->second) {
          if (w <= 0.0) continue;
          if (!guard_passes(rule.guard, net, ctx, node_id, target)) continue;
          r.push_back(OutEdge{"uses", target, w});
        }
      }
    } else {
      r = net.out_edges(node_id, {rule.label}, [&](const Edge& e) {
        return guard_passes(rule.guard, net, ctx, node_id, e.target);
      });
    }
    if (!r.empty()) return Admissible{static_cast<int>(i), std::move(r)};
  }
  return Admissible{};
}

} // namespace swarmrank
