#include "hxmesh/topology_io.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <regex>

namespace hxmesh {

using nlohmann::json;

namespace {

int to_int(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::kParse, "bad integer '" + s + "' in " + context);
  }
}

Medium medium_from(const std::string& s) {
  if (s == "pcb") return Medium::kPcb;
  if (s == "dac") return Medium::kDac;
  if (s == "aoc") return Medium::kAoc;
  fail(ErrorCode::kParse, "unknown medium '" + s + "'");
}

GlobalKind global_from(const std::string& s) {
  if (s == "auto") return GlobalKind::kAuto;
  if (s == "switch" || s == "single_switch") return GlobalKind::kSingleSwitch;
  if (s == "fat_tree" || s == "tree") return GlobalKind::kFatTree;
  fail(ErrorCode::kParse, "unknown global topology '" + s + "'");
}

const char* to_string(GlobalKind g) {
  switch (g) {
    case GlobalKind::kAuto: return "auto";
    case GlobalKind::kSingleSwitch: return "single_switch";
    case GlobalKind::kFatTree: return "fat_tree";
  }
  return "?";
}

DragonflyParams small_dragonfly() {
  DragonflyParams p;
  p.routers_per_group = 16;
  p.terminals_per_router = 8;
  p.global_per_router = 8;
  p.groups = 8;
  p.routers_per_switch = 2;
  return p;
}

DragonflyParams large_dragonfly() {
  DragonflyParams p;
  p.routers_per_group = 32;
  p.terminals_per_router = 17;
  p.global_per_router = 16;
  p.groups = 30;
  p.routers_per_switch = 1;
  return p;
}

}  // namespace

TopologySpec parse_shorthand(const std::string& text) {
  std::smatch m;
  static const std::regex hx(R"(hx(\d+):(\d+)x(\d+))");
  static const std::regex hyperx(R"(hyperx(?::(\d+)x(\d+))?)");
  static const std::regex ft(R"(ft:(nonblocking|taper50|taper75):(\d+))");
  static const std::regex df(R"(df:(small|large))");
  static const std::regex torus(R"(torus:(\d+)x(\d+))");
  if (std::regex_match(text, m, hx)) {
    HxMeshParams p;
    p.a = p.b = to_int(m[1], text);
    p.x = to_int(m[2], text);
    p.y = to_int(m[3], text);
    if (p.a == 1) return TopologySpec::hyperx(p.x, p.y);
    return TopologySpec::hxmesh(p, text);
  }
  if (std::regex_match(text, m, hyperx)) {
    if (!m[1].matched) return TopologySpec::hyperx(32, 32);
    return TopologySpec::hyperx(to_int(m[1], text), to_int(m[2], text));
  }
  if (std::regex_match(text, m, ft)) {
    const double taper = m[1] == "nonblocking" ? 1.0 : m[1] == "taper50" ? 0.5 : 0.25;
    return TopologySpec::fat_tree(fat_tree_from_taper(to_int(m[2], text), taper),
                                  text);
  }
  if (std::regex_match(text, m, df)) {
    return TopologySpec::dragonfly(m[1] == "small" ? small_dragonfly()
                                                   : large_dragonfly(),
                                   text);
  }
  if (std::regex_match(text, m, torus)) {
    TorusParams p;
    p.x = to_int(m[1], text);
    p.y = to_int(m[2], text);
    return TopologySpec::torus(p, text);
  }
  fail(ErrorCode::kParse, "unrecognized topology '" + text + "'");
}

TopologySpec parse_topology_arg(const std::string& arg) {
  const bool looks_like_file =
      arg.find('/') != std::string::npos || arg.ends_with(".json");
  if (!looks_like_file) return parse_shorthand(arg);
  if (!std::filesystem::exists(arg)) {
    fail(ErrorCode::kFileNotFound, "no such file: " + arg);
  }
  std::ifstream in(arg);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, arg + ": " + e.what());
  }
  return spec_from_json(j);
}

TopologySpec spec_from_json(const json& j) {
  try {
    const std::string family = j.at("family").get<std::string>();
    const std::string name = j.value("name", std::string{});
    if (family == "hxmesh") {
      HxMeshParams p;
      p.a = j.value("a", p.a);
      p.b = j.value("b", p.b);
      p.x = j.value("x", p.x);
      p.y = j.value("y", p.y);
      p.planes = j.value("planes", p.planes);
      p.global_kind = global_from(j.value("global", std::string("auto")));
      p.taper = j.value("taper", p.taper);
      p.radix = j.value("radix", p.radix);
      return TopologySpec::hxmesh(p, name);
    }
    if (family == "hyperx") {
      auto s = TopologySpec::hyperx(j.value("x", 32), j.value("y", 32),
                                    j.value("planes", 4), j.value("radix", 64));
      if (!name.empty()) s.name = name;
      return s;
    }
    if (family == "fat_tree") {
      FatTreeParams p;
      const int endpoints = j.value("endpoints", p.endpoints);
      const int planes = j.value("planes", p.planes);
      const int radix = j.value("radix", p.radix);
      if (j.contains("down_per_leaf")) {
        p.endpoints = endpoints;
        p.planes = planes;
        p.radix = radix;
        p.down_per_leaf = j.at("down_per_leaf").get<int>();
        p.up_per_leaf = j.value("up_per_leaf", radix - p.down_per_leaf);
      } else {
        p = fat_tree_from_taper(endpoints, j.value("taper", 1.0), planes, radix);
      }
      return TopologySpec::fat_tree(p, name);
    }
    if (family == "dragonfly") {
      DragonflyParams p;
      p.routers_per_group = j.value("routers_per_group", p.routers_per_group);
      p.terminals_per_router = j.value("terminals_per_router", p.terminals_per_router);
      p.global_per_router = j.value("global_per_router", p.global_per_router);
      p.groups = j.value("groups", p.groups);
      p.routers_per_switch = j.value("routers_per_switch", p.routers_per_switch);
      p.planes = j.value("planes", p.planes);
      p.radix = j.value("radix", p.radix);
      return TopologySpec::dragonfly(p, name);
    }
    if (family == "torus2d") {
      TorusParams p;
      p.x = j.value("x", p.x);
      p.y = j.value("y", p.y);
      p.board_a = j.value("board_a", p.board_a);
      p.board_b = j.value("board_b", p.board_b);
      p.planes = j.value("planes", p.planes);
      p.board_link_medium = medium_from(j.value("board_link", std::string("aoc")));
      return TopologySpec::torus(p, name);
    }
    fail(ErrorCode::kParse, "unknown family '" + family + "'");
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("topology spec: ") + e.what());
  }
}

json spec_to_json(const TopologySpec& spec) {
  json j;
  j["family"] = to_string(spec.family);
  j["name"] = spec.name;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, HxMeshParams>) {
          j["a"] = p.a;
          j["b"] = p.b;
          j["x"] = p.x;
          j["y"] = p.y;
          j["planes"] = p.planes;
          j["global"] = to_string(p.global_kind);
          j["taper"] = p.taper;
          j["radix"] = p.radix;
        } else if constexpr (std::is_same_v<P, FatTreeParams>) {
          j["endpoints"] = p.endpoints;
          j["down_per_leaf"] = p.down_per_leaf;
          j["up_per_leaf"] = p.up_per_leaf;
          j["planes"] = p.planes;
          j["radix"] = p.radix;
        } else if constexpr (std::is_same_v<P, DragonflyParams>) {
          j["routers_per_group"] = p.routers_per_group;
          j["terminals_per_router"] = p.terminals_per_router;
          j["global_per_router"] = p.global_per_router;
          j["groups"] = p.groups;
          j["routers_per_switch"] = p.routers_per_switch;
          j["planes"] = p.planes;
          j["radix"] = p.radix;
        } else {
          j["x"] = p.x;
          j["y"] = p.y;
          j["board_a"] = p.board_a;
          j["board_b"] = p.board_b;
          j["planes"] = p.planes;
          j["board_link"] = to_string(p.board_link_medium);
        }
      },
      spec.params);
  return j;
}

json topology_to_json(const Topology& t) {
  json j;
  j["spec"] = spec_to_json(t.spec());
  j["planes"] = t.planes();
  j["accelerators"] = t.accelerator_count();
  json nodes = json::array();
  for (NodeId n = 0; n < static_cast<NodeId>(t.node_count()); ++n) {
    const Node& nd = t.node(n);
    json e{{"id", n}};
    if (nd.kind == NodeKind::kAccelerator) {
      e["kind"] = "accelerator";
      e["x"] = nd.gx;
      e["y"] = nd.gy;
    } else {
      e["kind"] = "switch";
      e["plane"] = nd.plane;
      e["level"] = nd.level;
      e["physical"] = nd.physical;
      if (nd.group >= 0) e["group"] = nd.group;
      if (nd.dim != Dim::kNone) e["dim"] = nd.dim == Dim::kRow ? "row" : "column";
    }
    nodes.push_back(std::move(e));
  }
  json links = json::array();
  for (LinkId l = 0; l < static_cast<LinkId>(t.link_count()); ++l) {
    const Link& k = t.link(l);
    json e{{"id", l},
           {"u", k.u},
           {"v", k.v},
           {"plane", k.plane},
           {"medium", to_string(k.medium)},
           {"capacity_gbps", k.capacity_gbps}};
    if (k.u_port != Port::kNone) e["u_port"] = to_string(k.u_port);
    if (k.v_port != Port::kNone) e["v_port"] = to_string(k.v_port);
    links.push_back(std::move(e));
  }
  j["nodes"] = std::move(nodes);
  j["links"] = std::move(links);
  return j;
}

void write_edge_csv(const Topology& t, std::ostream& out) {
  out << "link,u,v,plane,medium,capacity_gbps,u_port,v_port\n";
  for (LinkId l = 0; l < static_cast<LinkId>(t.link_count()); ++l) {
    const Link& k = t.link(l);
    out << l << ',' << k.u << ',' << k.v << ',' << k.plane << ','
        << to_string(k.medium) << ',' << k.capacity_gbps << ','
        << to_string(k.u_port) << ',' << to_string(k.v_port) << '\n';
  }
}

const char* to_string(SizeClass s) {
  return s == SizeClass::kSmall ? "small" : "large";
}

std::vector<ReferenceConfig> reference_configs() {
  std::vector<ReferenceConfig> out;
  for (SizeClass size : {SizeClass::kSmall, SizeClass::kLarge}) {
    const bool small = size == SizeClass::kSmall;
    const int ft_full = small ? 1024 : 16384;
    const int ft_50 = small ? 1050 : 16380;
    const int ft_75 = small ? 1071 : 16422;
    out.push_back({"nonblocking_ft", size,
                   TopologySpec::fat_tree(fat_tree_from_taper(ft_full, 1.0))});
    out.push_back({"taper50_ft", size,
                   TopologySpec::fat_tree(fat_tree_from_taper(ft_50, 0.5))});
    out.push_back({"taper75_ft", size,
                   TopologySpec::fat_tree(fat_tree_from_taper(ft_75, 0.25))});
    out.push_back({"dragonfly", size,
                   TopologySpec::dragonfly(small ? small_dragonfly()
                                                 : large_dragonfly())});
    const int side = small ? 32 : 128;
    out.push_back({"hyperx", size, TopologySpec::hyperx(side, side)});
    HxMeshParams h2;
    h2.a = h2.b = 2;
    h2.x = h2.y = side / 2;
    out.push_back({"hx2mesh", size, TopologySpec::hxmesh(h2)});
    HxMeshParams h4;
    h4.a = h4.b = 4;
    h4.x = h4.y = side / 4;
    out.push_back({"hx4mesh", size, TopologySpec::hxmesh(h4)});
    TorusParams tp;
    tp.x = tp.y = side;
    out.push_back({"torus", size, TopologySpec::torus(tp)});
  }
  return out;
}

ReferenceConfig reference_config(const std::string& label, SizeClass size) {
  for (auto& c : reference_configs()) {
    if (c.label == label && c.size == size) return c;
  }
  fail(ErrorCode::kInvalidArgument, "unknown reference config '" + label + "'");
}

}  // namespace hxmesh
