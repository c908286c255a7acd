#include "swarmrank/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swarmrank {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MissingOwner: return "MissingOwner";
    case Errc::MissingParent: return "MissingParent";
    case Errc::WrongReferentSort: return "WrongReferentSort";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::NegativeWeight: return "NegativeWeight";
    case Errc::SchemaViolation: return "SchemaViolation";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::EmptyDistribution: return "EmptyDistribution";
    case Errc::ZeroTotalWeight: return "ZeroTotalWeight";
    case Errc::UnknownGrammar: return "UnknownGrammar";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::UnknownGuard: return "UnknownGuard";
    case Errc::DanglingState: return "DanglingState";
    case Errc::SortMismatch: return "SortMismatch";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NoOutputEnergy: return "NoOutputEnergy";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnknownProblem: return "UnknownProblem";
    case Errc::NoCategorizations: return "NoCategorizations";
    case Errc::NoHumans: return "NoHumans";
    case Errc::MissingPayload: return "MissingPayload";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
  }
  return "Error";
}

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Human: return "human";
    case Sort::Domain: return "domain";
    case Sort::Problem: return "problem";
    case Sort::Solution: return "solution";
  }
  return "?";
}

std::optional<Sort> sort_from_name(std::string_view s) {
  if (s == "human") return Sort::Human;
  if (s == "domain") return Sort::Domain;
  if (s == "problem") return Sort::Problem;
  if (s == "solution") return Sort::Solution;
  return std::nullopt;
}

const char* schema_mode_name(SchemaMode m) {
  return m == SchemaMode::SingleDomain ? "single-domain" : "multiple-domains";
}

std::optional<SchemaMode> schema_mode_from_name(std::string_view s) {
  if (s == "single-domain") return SchemaMode::SingleDomain;
  if (s == "multiple-domains") return SchemaMode::MultipleDomains;
  return std::nullopt;
}

Schema Schema::core(SchemaMode mode) {
  Schema s(mode);
  // problem space, common to both modes
  s.rules_["hasProposed"] = {{Sort::Problem, Sort::Solution}};
  s.rules_["created"] = {{Sort::Human, Sort::Problem}};
  s.rules_["categorizedAs"] = {{Sort::Domain, Sort::Problem}};
  s.rules_["proposed"] = {{Sort::Human, Sort::Solution}};
  s.rules_["votedOn"] = {{Sort::Human, Sort::Solution}};
  if (mode == SchemaMode::MultipleDomains) {
    s.rules_["uses"] = {{Sort::Human, Sort::Domain}};
    s.rules_["trusts"] = {{Sort::Domain, Sort::Human}};
    s.rules_["similarTo"] = {{Sort::Domain, Sort::Domain}};
  } else {
    // trust is irrespective of context
    s.rules_["trusts"] = {{Sort::Human, Sort::Human}};
  }
  return s;
}

bool Schema::has_label(const std::string& label) const { return rules_.count(label) > 0; }

bool Schema::allows(const std::string& label, Sort source, Sort target) const {
  auto it = rules_.find(label);
  if (it == rules_.end()) return false;
  for (const auto& r : it->second)
    if (r.source == source && r.target == target) return true;
  return false;
}

void Schema::register_label(const std::string& label, std::vector<EndpointRule> rules) {
  if (rules.empty()) fail(Errc::SchemaViolation, "label '" + label + "' needs at least one endpoint rule");
  rules_[label] = std::move(rules);
}

Network::Network(Schema schema) : schema_(std::move(schema)) {}

NodeId Network::fresh_id(Sort sort) {
  static const char prefix[4] = {'h', 'd', 'p', 's'};
  auto k = static_cast<std::size_t>(sort);
  for (;;) {
    NodeId id = prefix[k] + std::to_string(id_counter_[k]++);
    if (!index_.count(id)) return id;
  }
}

void Network::check_node_spec(Sort sort, const std::optional<NodeId>& owner_or_parent,
                              const std::optional<std::string>& name) const {
  if (sort == Sort::Domain) {
    if (!owner_or_parent) fail(Errc::MissingOwner, "domain node needs an owning human");
    if (!name) fail(Errc::SchemaViolation, "domain node needs a name");
    auto it = index_.find(*owner_or_parent);
    if (it == index_.end()) fail(Errc::UnknownNode, "owner '" + *owner_or_parent + "' does not exist");
    if (nodes_[it->second].sort != Sort::Human)
      fail(Errc::WrongReferentSort, "owner '" + *owner_or_parent + "' is not a human");
  } else if (sort == Sort::Solution) {
    if (!owner_or_parent) fail(Errc::MissingParent, "solution node needs a parent problem");
    auto it = index_.find(*owner_or_parent);
    if (it == index_.end()) fail(Errc::UnknownNode, "parent '" + *owner_or_parent + "' does not exist");
    if (nodes_[it->second].sort != Sort::Problem)
      fail(Errc::WrongReferentSort, "parent '" + *owner_or_parent + "' is not a problem");
    if (name) fail(Errc::WrongReferentSort, "only domain nodes carry a name");
  } else {
    if (owner_or_parent)
      fail(Errc::WrongReferentSort, std::string(sort_name(sort)) + " nodes take no owner or parent");
    if (name) fail(Errc::WrongReferentSort, "only domain nodes carry a name");
  }
}

NodeId Network::add_node(Sort sort, std::optional<NodeId> owner_or_parent,
                         std::optional<std::string> name, std::optional<double> payload) {
  return add_node_with_id(fresh_id(sort), sort, std::move(owner_or_parent), std::move(name),
                          std::move(payload));
}

NodeId Network::add_node_with_id(const NodeId& id, Sort sort,
                                 std::optional<NodeId> owner_or_parent,
                                 std::optional<std::string> name, std::optional<double> payload) {
  if (id.empty()) fail(Errc::SchemaViolation, "node id must be nonempty");
  if (index_.count(id)) fail(Errc::SchemaViolation, "node id '" + id + "' already exists");
  check_node_spec(sort, owner_or_parent, name);
  Node n;
  n.id = id;
  n.sort = sort;
  if (sort == Sort::Domain) n.owner = std::move(owner_or_parent);
  if (sort == Sort::Solution) n.parent = std::move(owner_or_parent);
  n.name = std::move(name);
  n.payload = payload;
  index_[id] = static_cast<NodeIndex>(nodes_.size());
  nodes_.push_back(std::move(n));
  adj_.emplace_back();
  return id;
}

static std::string edge_str(const NodeId& s, const std::string& l, const NodeId& t) {
  return s + " -" + l + "-> " + t;
}

void Network::add_edge(const NodeId& source, const std::string& label, const NodeId& target,
                       double weight) {
  auto si = index_.find(source);
  if (si == index_.end()) fail(Errc::UnknownNode, "source '" + source + "' does not exist");
  auto ti = index_.find(target);
  if (ti == index_.end()) fail(Errc::UnknownNode, "target '" + target + "' does not exist");
  if (!(weight >= 0.0) || !std::isfinite(weight))
    fail(Errc::NegativeWeight, "weight of " + edge_str(source, label, target) +
                                   " must be finite and non-negative");
  const Node& sn = nodes_[si->second];
  const Node& tn = nodes_[ti->second];
  if (!schema_.allows(label, sn.sort, tn.sort))
    fail(Errc::SchemaViolation, edge_str(source, label, target) + " (" + sort_name(sn.sort) +
                                    " -> " + sort_name(tn.sort) + ") not allowed by schema");
  // ownership-qualified rules
  if (label == "uses" && (!tn.owner || *tn.owner != source))
    fail(Errc::SchemaViolation, "uses target '" + target + "' is not owned by '" + source + "'");
  if (label == "hasProposed" && (!tn.parent || *tn.parent != source))
    fail(Errc::SchemaViolation,
         "hasProposed target '" + target + "' is not a solution of '" + source + "'");
  for (std::uint32_t ei : out_edge_indices(si->second, label))
    if (edges_[ei].target == target)
      fail(Errc::DuplicateEdge, edge_str(source, label, target) + " already present");
  adj_[si->second][label].push_back(static_cast<std::uint32_t>(edges_.size()));
  edges_.push_back(Edge{source, label, target, weight});
}

void Network::set_edge_weight(const NodeId& source, const std::string& label,
                              const NodeId& target, double weight) {
  auto si = index_.find(source);
  if (si == index_.end()) fail(Errc::UnknownNode, "source '" + source + "' does not exist");
  if (!(weight >= 0.0) || !std::isfinite(weight))
    fail(Errc::NegativeWeight, "weight of " + edge_str(source, label, target) +
                                   " must be finite and non-negative");
  for (std::uint32_t ei : out_edge_indices(si->second, label)) {
    if (edges_[ei].target == target) {
      edges_[ei].weight = weight;
      return;
    }
  }
  fail(Errc::UnknownNode, "no edge " + edge_str(source, label, target));
}

void Network::add_edge_unchecked(Edge e) {
  auto si = index_.find(e.source);
  if (si != index_.end())
    adj_[si->second][e.label].push_back(static_cast<std::uint32_t>(edges_.size()));
  edges_.push_back(std::move(e));
}

void Network::add_node_unchecked(Node n) {
  if (n.id.empty()) fail(Errc::SchemaViolation, "node id must be nonempty");
  if (index_.count(n.id)) fail(Errc::SchemaViolation, "node id '" + n.id + "' already exists");
  index_[n.id] = static_cast<NodeIndex>(nodes_.size());
  nodes_.push_back(std::move(n));
  adj_.emplace_back();
}

bool Network::has_node(const NodeId& id) const { return index_.count(id) > 0; }

const Node& Network::node(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) fail(Errc::UnknownNode, "node '" + id + "' does not exist");
  return nodes_[it->second];
}

NodeIndex Network::index_of(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) fail(Errc::UnknownNode, "node '" + id + "' does not exist");
  return it->second;
}

std::vector<NodeId> Network::ids_of_sort(Sort s) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_)
    if (n.sort == s) out.push_back(n.id);
  return out;
}

std::vector<NodeIndex> Network::indices_of_sort(Sort s) const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].sort == s) out.push_back(i);
  return out;
}

std::vector<NodeId> Network::solutions_of(const NodeId& problem) const {
  const Node& p = node(problem);
  if (p.sort != Sort::Problem) fail(Errc::WrongReferentSort, "'" + problem + "' is not a problem");
  std::vector<NodeId> out;
  for (const auto& n : nodes_)
    if (n.sort == Sort::Solution && n.parent && *n.parent == problem) out.push_back(n.id);
  return out;
}

std::vector<NodeId> Network::domains_of(const NodeId& human) const {
  const Node& h = node(human);
  if (h.sort != Sort::Human) fail(Errc::WrongReferentSort, "'" + human + "' is not a human");
  std::vector<NodeId> out;
  for (const auto& n : nodes_)
    if (n.sort == Sort::Domain && n.owner && *n.owner == human) out.push_back(n.id);
  return out;
}

std::vector<OutEdge> Network::out_edges(const NodeId& node_id, const std::set<std::string>& labels,
                                        const EdgePredicate& guard) const {
  NodeIndex src = index_of(node_id);
  std::vector<OutEdge> r;
  for (const auto& label : labels) {
    for (std::uint32_t ei : out_edge_indices(src, label)) {
      const Edge& e = edges_[ei];
      if (e.weight <= 0.0) continue;
      if (guard && !guard(e)) continue;
      r.push_back(OutEdge{e.label, e.target, e.weight});
    }
  }
  return r;
}

std::span<const std::uint32_t> Network::out_edge_indices(NodeIndex source,
                                                         const std::string& label) const {
  static const std::vector<std::uint32_t> empty;
  const auto& by_label = adj_[source];
  auto it = by_label.find(label);
  if (it == by_label.end()) return empty;
  return it->second;
}

bool Network::has_voted_on(NodeIndex human, const std::set<NodeIndex>& solutions) const {
  for (std::uint32_t ei : out_edge_indices(human, "votedOn")) {
    const Edge& e = edges_[ei];
    if (e.weight <= 0.0) continue;
    auto ti = index_.find(e.target);
    if (ti != index_.end() && solutions.count(ti->second)) return true;
  }
  return false;
}

std::vector<Violation> Network::validate() const {
  std::vector<Violation> v;
  auto note = [&](const char* rule, std::string subject, std::string detail) {
    v.push_back(Violation{rule, std::move(subject), std::move(detail)});
  };

  for (const auto& n : nodes_) {
    switch (n.sort) {
      case Sort::Domain:
        if (!n.owner) {
          note("MissingOwner", n.id, "domain has no owning human");
        } else if (!index_.count(*n.owner)) {
          note("UnknownNode", n.id, "owner '" + *n.owner + "' does not exist");
        } else if (node(*n.owner).sort != Sort::Human) {
          note("WrongReferentSort", n.id, "owner '" + *n.owner + "' is not a human");
        }
        if (!n.name) note("SchemaViolation", n.id, "domain has no name");
        if (n.parent) note("WrongReferentSort", n.id, "domain carries a parent");
        break;
      case Sort::Solution:
        if (!n.parent) {
          note("MissingParent", n.id, "solution has no parent problem");
        } else if (!index_.count(*n.parent)) {
          note("UnknownNode", n.id, "parent '" + *n.parent + "' does not exist");
        } else if (node(*n.parent).sort != Sort::Problem) {
          note("WrongReferentSort", n.id, "parent '" + *n.parent + "' is not a problem");
        }
        if (n.owner) note("WrongReferentSort", n.id, "solution carries an owner");
        if (n.name) note("WrongReferentSort", n.id, "solution carries a name");
        break;
      default:
        if (n.owner) note("WrongReferentSort", n.id, "node carries an owner");
        if (n.parent) note("WrongReferentSort", n.id, "node carries a parent");
        if (n.name) note("WrongReferentSort", n.id, "node carries a name");
        break;
    }
  }

  std::set<std::string> seen;
  for (const auto& e : edges_) {
    std::string subj = edge_str(e.source, e.label, e.target);
    auto si = index_.find(e.source);
    auto ti = index_.find(e.target);
    if (si == index_.end()) note("UnknownNode", subj, "source does not exist");
    if (ti == index_.end()) note("UnknownNode", subj, "target does not exist");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      note("NegativeWeight", subj, "weight is negative or not finite");
    if (si != index_.end() && ti != index_.end()) {
      Sort ss = nodes_[si->second].sort;
      Sort ts = nodes_[ti->second].sort;
      if (!schema_.allows(e.label, ss, ts)) {
        note("SchemaViolation", subj, std::string(sort_name(ss)) + " -> " + sort_name(ts) +
                                          " not allowed for label '" + e.label + "'");
      } else if (e.label == "uses") {
        const Node& tn = nodes_[ti->second];
        if (!tn.owner || *tn.owner != e.source)
          note("SchemaViolation", subj, "uses target not owned by source");
      } else if (e.label == "hasProposed") {
        const Node& tn = nodes_[ti->second];
        if (!tn.parent || *tn.parent != e.source)
          note("SchemaViolation", subj, "hasProposed target not a solution of source");
      }
    }
    if (!seen.insert(e.source + '\x1f' + e.label + '\x1f' + e.target).second)
      note("DuplicateEdge", subj, "parallel edge with same (source, label, target)");
  }
  return v;
}

std::map<NodeId, double> normalize_distribution(const std::vector<OutEdge>& r) {
  if (r.empty()) fail(Errc::EmptyDistribution, "cannot normalize an empty edge set");
  std::map<NodeId, double> weights;
  double total = 0.0;
  for (const auto& e : r) {
    weights[e.target] += e.weight;
    total += e.weight;
  }
  if (!(total > 0.0)) fail(Errc::ZeroTotalWeight, "edge set has zero total weight");
  for (auto& [id, w] : weights) w /= total;
  return weights;
}

} // namespace swarmrank
