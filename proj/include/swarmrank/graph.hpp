#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swarmrank/errors.hpp"

namespace swarmrank {

using NodeId = std::string;
using NodeIndex = std::uint32_t;

/// The four node sorts partition the network: social space (humans, domains)
/// and problem space (problems, solutions).
enum class Sort : std::uint8_t { Human, Domain, Problem, Solution };

const char* sort_name(Sort s);
std::optional<Sort> sort_from_name(std::string_view s);

struct Node {
  NodeId id;
  Sort sort = Sort::Human;
  std::optional<NodeId> owner;       // Domain only: the owning human
  std::optional<NodeId> parent;      // Solution only: the parent problem
  std::optional<std::string> name;   // Domain only: shared label, e.g. "SDSS"
  std::optional<double> payload;     // Solution: numeric value for averaging selection
};

struct Edge {
  NodeId source;
  std::string label;
  NodeId target;
  double weight = 0.0;
};

/// One outgoing edge as seen by a traversal (the members of the set R).
struct OutEdge {
  std::string label;
  NodeId target;
  double weight = 0.0;

  bool operator==(const OutEdge&) const = default;
};

enum class SchemaMode { SingleDomain, MultipleDomains };

const char* schema_mode_name(SchemaMode m);
std::optional<SchemaMode> schema_mode_from_name(std::string_view s);

struct EndpointRule {
  Sort source;
  Sort target;
};

/// Which labels may connect which sorts. Core rules depend on the mode;
/// additional labels (e.g. the argumentation edges pro/con/neutral/inquiry)
/// can be registered without affecting the traversal algorithms.
class Schema {
public:
  static Schema core(SchemaMode mode);

  SchemaMode mode() const { return mode_; }
  bool has_label(const std::string& label) const;
  bool allows(const std::string& label, Sort source, Sort target) const;
  void register_label(const std::string& label, std::vector<EndpointRule> rules);
  const std::map<std::string, std::vector<EndpointRule>>& rules() const { return rules_; }

private:
  explicit Schema(SchemaMode mode) : mode_(mode) {}

  SchemaMode mode_ = SchemaMode::MultipleDomains;
  std::map<std::string, std::vector<EndpointRule>> rules_;
};

/// A rule violation found by validate(). Violations are reported as data,
/// not thrown.
struct Violation {
  std::string rule;     // e.g. "SchemaViolation", "UnknownNode"
  std::string subject;  // offending node id or edge triple
  std::string detail;
};

/// The typed, weighted, labeled directed multigraph G = (N, W).
///
/// Mutation requires exclusive access; all read operations are safe under
/// concurrent readers. The swarm engine only ever takes a const reference,
/// so a network is effectively a read snapshot for the duration of a run.
class Network {
public:
  explicit Network(Schema schema = Schema::core(SchemaMode::MultipleDomains));

  // --- construction ---

  /// Adds a node with a generated id (h0, d0, p0, s0, ...).
  /// `owner_or_parent` is the owning human for a Domain, the parent problem
  /// for a Solution, and must be absent otherwise. `name` is required for
  /// Domain nodes and disallowed elsewhere.
  NodeId add_node(Sort sort, std::optional<NodeId> owner_or_parent = std::nullopt,
                  std::optional<std::string> name = std::nullopt,
                  std::optional<double> payload = std::nullopt);

  /// Same, with a caller-chosen id (scenario file loading).
  NodeId add_node_with_id(const NodeId& id, Sort sort,
                          std::optional<NodeId> owner_or_parent = std::nullopt,
                          std::optional<std::string> name = std::nullopt,
                          std::optional<double> payload = std::nullopt);

  /// Adds a schema-checked edge. Parallel (source, label, target) edges are
  /// rejected; use set_edge_weight to change an existing weight.
  void add_edge(const NodeId& source, const std::string& label, const NodeId& target,
                double weight);

  void set_edge_weight(const NodeId& source, const std::string& label, const NodeId& target,
                       double weight);

  /// Inserts an edge bypassing all checks. validate() will report the damage;
  /// exists for the scenario loader and for tests that build broken networks.
  void add_edge_unchecked(Edge e);

  /// Inserts a node without referent checks (same callers as
  /// add_edge_unchecked). Ids must still be unique and nonempty.
  void add_node_unchecked(Node n);

  // --- lookup ---

  bool has_node(const NodeId& id) const;
  const Node& node(const NodeId& id) const;
  const Node& node_at(NodeIndex i) const { return nodes_[i]; }
  NodeIndex index_of(const NodeId& id) const;
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Schema& schema() const { return schema_; }

  std::vector<NodeId> ids_of_sort(Sort s) const;
  std::vector<NodeIndex> indices_of_sort(Sort s) const;

  /// p_j(S): solutions whose parent is `problem`, in insertion order.
  std::vector<NodeId> solutions_of(const NodeId& problem) const;
  /// h_i(D): domains owned by `human`, in insertion order.
  std::vector<NodeId> domains_of(const NodeId& human) const;

  // --- traversal ---

  using EdgePredicate = std::function<bool(const Edge&)>;

  /// The weighted edge set R: outgoing edges of `node` whose label is in
  /// `labels` and whose weight is positive, optionally filtered by a guard
  /// predicate. Zero-weight edges are stored but never traversed.
  std::vector<OutEdge> out_edges(const NodeId& node, const std::set<std::string>& labels,
                                 const EdgePredicate& guard = nullptr) const;

  /// Index-level adjacency for the engine: edge indices for (source, label).
  std::span<const std::uint32_t> out_edge_indices(NodeIndex source, const std::string& label) const;

  const Edge& edge_at(std::uint32_t i) const { return edges_[i]; }

  /// True iff `human` has a positive-weight votedOn edge into `solutions`.
  bool has_voted_on(NodeIndex human, const std::set<NodeIndex>& solutions) const;

  // --- validation ---

  /// Empty iff every type invariant and schema rule holds.
  std::vector<Violation> validate() const;

private:
  NodeId fresh_id(Sort sort);
  void check_node_spec(Sort sort, const std::optional<NodeId>& owner_or_parent,
                       const std::optional<std::string>& name) const;

  Schema schema_;
  std::vector<Node> nodes_;
  std::map<NodeId, NodeIndex> index_;
  std::vector<Edge> edges_;
  // adjacency: per source node, label -> edge indices
  std::vector<std::map<std::string, std::vector<std::uint32_t>>> adj_;
  std::uint64_t id_counter_[4] = {0, 0, 0, 0};
};

/// Normalizes R into a probability distribution over target nodes
/// (weights of edges sharing a target are summed first).
std::map<NodeId, double> normalize_distribution(const std::vector<OutEdge>& r);

} // namespace swarmrank
