#include "swarmrank/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace swarmrank {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void reject_unknown_fields(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) ok = true;
    if (!ok) fail(Errc::ParseError, where + ": unknown field '" + it.key() + "'");
  }
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(Errc::ParseError, where + ": missing field '" + key + "'");
  if (!it->is_string()) fail(Errc::ParseError, where + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

double require_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(Errc::ParseError, where + ": missing field '" + key + "'");
  if (!it->is_number()) fail(Errc::ParseError, where + ": field '" + key + "' must be a number");
  return it->get<double>();
}

} // namespace

Network load_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(Errc::ParseError, e.what());
  }
  if (!doc.is_object()) fail(Errc::ParseError, "scenario document must be a JSON object");
  reject_unknown_fields(doc, {"schema", "nodes", "edges"}, "document");

  std::string mode_name = require_string(doc, "schema", "document");
  auto mode = schema_mode_from_name(mode_name);
  if (!mode) fail(Errc::ParseError, "unknown schema '" + mode_name + "'");

  auto nodes_it = doc.find("nodes");
  auto edges_it = doc.find("edges");
  if (nodes_it == doc.end() || !nodes_it->is_array())
    fail(Errc::ParseError, "document: 'nodes' must be an array");
  if (edges_it == doc.end() || !edges_it->is_array())
    fail(Errc::ParseError, "document: 'edges' must be an array");

  Network net(Schema::core(*mode));
  for (const auto& jn : *nodes_it) {
    if (!jn.is_object()) fail(Errc::ParseError, "nodes: entries must be objects");
    std::string id = require_string(jn, "id", "node");
    const std::string where = "node '" + id + "'";
    reject_unknown_fields(jn, {"id", "sort", "owner", "parent", "name", "payload"}, where);
    std::string sort_str = require_string(jn, "sort", where);
    auto sort = sort_from_name(sort_str);
    if (!sort) fail(Errc::ParseError, where + ": unknown sort '" + sort_str + "'");
    Node n;
    n.id = id;
    n.sort = *sort;
    if (jn.contains("owner")) n.owner = require_string(jn, "owner", where);
    if (jn.contains("parent")) n.parent = require_string(jn, "parent", where);
    if (jn.contains("name")) n.name = require_string(jn, "name", where);
    if (jn.contains("payload")) n.payload = require_number(jn, "payload", where);
    if (net.has_node(id)) fail(Errc::ParseError, "duplicate node id '" + id + "'");
    net.add_node_unchecked(std::move(n));
  }
  for (const auto& je : *edges_it) {
    if (!je.is_object()) fail(Errc::ParseError, "edges: entries must be objects");
    std::string source = require_string(je, "source", "edge");
    std::string label = require_string(je, "label", "edge");
    std::string target = require_string(je, "target", "edge");
    const std::string where = "edge " + source + " -" + label + "-> " + target;
    reject_unknown_fields(je, {"source", "label", "target", "weight"}, where);
    double weight = require_number(je, "weight", where);
    net.add_edge_unchecked(Edge{source, label, target, weight});
  }
  return net;
}

Network load_scenario_file(const std::string& path) {
  return load_scenario(read_file(path));
}

std::string save_scenario(const Network& net) {
  ordered_json doc;
  doc["schema"] = schema_mode_name(net.schema().mode());

  std::vector<const Node*> nodes;
  for (NodeIndex i = 0; i < net.node_count(); ++i) nodes.push_back(&net.node_at(i));
  std::sort(nodes.begin(), nodes.end(),
            [](const Node* a, const Node* b) { return a->id < b->id; });
  doc["nodes"] = ordered_json::array();
  for (const Node* n : nodes) {
    ordered_json jn;
    jn["id"] = n->id;
    jn["sort"] = sort_name(n->sort);
    if (n->owner) jn["owner"] = *n->owner;
    if (n->parent) jn["parent"] = *n->parent;
    if (n->name) jn["name"] = *n->name;
    if (n->payload) jn["payload"] = *n->payload;
    doc["nodes"].push_back(std::move(jn));
  }

  std::vector<const Edge*> edges;
  for (const auto& e : net.edges()) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](const Edge* a, const Edge* b) {
    return std::tie(a->source, a->label, a->target) < std::tie(b->source, b->label, b->target);
  });
  doc["edges"] = ordered_json::array();
  for (const Edge* e : edges) {
    ordered_json je;
    je["source"] = e->source;
    je["label"] = e->label;
    je["target"] = e->target;
    je["weight"] = e->weight;
    doc["edges"].push_back(std::move(je));
  }
  return doc.dump(2) + "\n";
}

void save_scenario_file(const Network& net, const std::string& path) {
  write_file(path, save_scenario(net));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(Errc::IoError, "error while reading '" + path + "'");
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot write '" + path + "'");
  out << content;
  out.flush();
  if (!out) fail(Errc::IoError, "error while writing '" + path + "'");
}

} // namespace swarmrank
