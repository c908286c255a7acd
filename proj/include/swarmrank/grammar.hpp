#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "swarmrank/graph.hpp"

namespace swarmrank {

enum class GuardKind : std::uint8_t {
  None,
  TargetHasVotedOn,  // target has >=1 positive votedOn edge into the active problem's solutions
  CurrentInSet,      // current node is a member of a named node set
  TargetInSet,       // edge target is a member of a named node set
};

struct EdgeGuard {
  GuardKind kind = GuardKind::None;
  std::string set_name;  // CurrentInSet / TargetInSet only

  bool operator==(const EdgeGuard&) const = default;
};

/// One edge-label preference of a grammar state. Rules are tried in order;
/// the first whose guarded edge set is nonempty is taken.
struct Rule {
  std::string label;
  EdgeGuard guard;
  std::string next_state;

  bool operator==(const Rule&) const = default;
};

struct GrammarState {
  std::string id;
  Sort sort = Sort::Human;       // the state applies to nodes of this sort
  std::vector<Rule> rules;       // ordered; exhaustion destroys the particle

  bool operator==(const GrammarState&) const = default;
};

/// A finite state machine over node sorts with ordered, guarded edge-label
/// preferences. Immutable after construction; safe to share across workers.
class TraversalGrammar {
public:
  TraversalGrammar(std::string name, std::vector<GrammarState> states, std::string start_state,
                   std::set<Sort> terminal_sorts);

  const std::string& name() const { return name_; }
  const std::vector<GrammarState>& states() const { return states_; }
  const std::string& start_state() const { return start_state_; }
  const std::set<Sort>& terminal_sorts() const { return terminal_sorts_; }
  bool is_terminal(Sort s) const { return terminal_sorts_.count(s) > 0; }

  const GrammarState& state(const std::string& id) const;
  std::size_t state_index(const std::string& id) const;
  bool references_label(const std::string& label) const;

  bool operator==(const TraversalGrammar& other) const {
    return name_ == other.name_ && states_ == other.states_ &&
           start_state_ == other.start_state_ && terminal_sorts_ == other.terminal_sorts_;
  }

private:
  std::string name_;
  std::vector<GrammarState> states_;
  std::string start_state_;
  std::set<Sort> terminal_sorts_;
  std::map<std::string, std::size_t> by_id_;
};

/// Built-in grammars: dd, rd, ddd, dictator, domain_direct, domain_recursive,
/// rd_single, ddd_single.
const TraversalGrammar& builtin_grammar(const std::string& name);
const std::vector<std::string>& builtin_grammar_names();

/// Run-time context a traversal is evaluated against: the active problem,
/// its solution set, named node sets for guards, and the virtual `uses`
/// layer derived before particle diffusion. The layer, when present, is the
/// only source of `uses` edges.
struct TraversalContext {
  std::optional<NodeId> problem;
  std::set<NodeId> problem_solutions;
  std::map<std::string, std::set<NodeId>> node_sets;
  std::optional<std::map<NodeId, std::vector<std::pair<NodeId, double>>>> uses_edges;

  static TraversalContext for_problem(const Network& net, const NodeId& problem);

  const std::set<NodeId>& named_set(const std::string& name) const;
};

/// Result of resolving a grammar state at a node: the first rule in order
/// with a nonempty guarded edge set, or a death signal when none fires.
struct Admissible {
  int rule_index = -1;  // -1: no rule fired, the particle dies
  std::vector<OutEdge> edges;

  bool died() const { return rule_index < 0; }
};

bool guard_passes(const EdgeGuard& guard, const Network& net, const TraversalContext& ctx,
                  const NodeId& current, const NodeId& target);

Admissible admissible_edges(const TraversalGrammar& g, const std::string& state_id,
                            const NodeId& node, const Network& net, const TraversalContext& ctx);

} // namespace swarmrank
