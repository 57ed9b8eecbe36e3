#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "hxmesh/topology.hpp"

namespace hxmesh {

// Parses shorthands such as hx2:16x16, hyperx:32x32, ft:taper50:1050,
// df:small, torus:32x32, or a path to a JSON spec file.
TopologySpec parse_topology_arg(const std::string& arg);
TopologySpec parse_shorthand(const std::string& text);
TopologySpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const TopologySpec& spec);

nlohmann::json topology_to_json(const Topology& t);
void write_edge_csv(const Topology& t, std::ostream& out);

enum class SizeClass { kSmall, kLarge };
const char* to_string(SizeClass s);

struct ReferenceConfig {
  std::string label;  // nonblocking_ft, taper50_ft, ..., torus
  SizeClass size;
  TopologySpec spec;
};

// The eight reference networks at both cluster sizes.
std::vector<ReferenceConfig> reference_configs();
ReferenceConfig reference_config(const std::string& label, SizeClass size);

}  // namespace hxmesh
