#pragma once

#include <string>

#include "swarmrank/graph.hpp"

namespace swarmrank {

/// Parses a scenario document:
///
///   {"schema": "multiple-domains" | "single-domain",
///    "nodes": [{"id", "sort", "owner"?, "parent"?, "name"?, "payload"?}, ...],
///    "edges": [{"source", "label", "target", "weight"}, ...]}
///
/// Unknown fields are rejected. Only document shape is enforced here; graph
/// rules (schema conformance, referent sorts, dangling ids) are left to
/// Network::validate so that rule-breaking files can still be inspected.
Network load_scenario(const std::string& json_text);

Network load_scenario_file(const std::string& path);

/// Canonical serialization: nodes sorted by id, edges by (source, label,
/// target), two-space indent, LF endings. Byte-stable for equal networks.
std::string save_scenario(const Network& net);

void save_scenario_file(const Network& net, const std::string& path);

/// Reads a whole file; IoError when unreadable.
std::string read_file(const std::string& path);

void write_file(const std::string& path, const std::string& content);

} // namespace swarmrank
