#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hxmesh/error.hpp"

namespace hxmesh {

using NodeId = std::int32_t;
using LinkId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

enum class Family { kHxMesh, kHyperX, kFatTree, kDragonfly, kTorus2d };
enum class NodeKind : std::uint8_t { kAccelerator, kSwitch };
enum class Medium : std::uint8_t { kPcb, kDac, kAoc };
enum class Port : std::uint8_t { kEast, kWest, kNorth, kSouth, kNone };
enum class GlobalKind { kAuto, kSingleSwitch, kFatTree };
enum class Dim : std::int8_t { kNone = -1, kRow = 0, kColumn = 1 };

const char* to_string(Family f);
const char* to_string(Medium m);
const char* to_string(Port p);
Port opposite(Port p);

inline constexpr double kLinkGbps = 400.0;

struct HxMeshParams {
  int a = 2;  // board width (accelerators per board row)
  int b = 2;  // board height
  int x = 16;  // boards per row
  int y = 16;  // boards per column
  int planes = 4;
  GlobalKind global_kind = GlobalKind::kAuto;
  double taper = 1.0;
  int radix = 64;
};

struct FatTreeParams {
  int endpoints = 1024;
  int down_per_leaf = 32;
  int up_per_leaf = 32;
  int planes = 16;
  int radix = 64;
};

struct DragonflyParams {
  int routers_per_group = 16;
  int terminals_per_router = 8;
  int global_per_router = 8;
  int groups = 8;
  int routers_per_switch = 2;  // virtual routers packed into one physical switch
  int planes = 16;
  int radix = 64;
};

struct TorusParams {
  int x = 32;
  int y = 32;
  int board_a = 2;
  int board_b = 2;
  int planes = 4;
  Medium board_link_medium = Medium::kAoc;
};

using FamilyParams =
    std::variant<HxMeshParams, FatTreeParams, DragonflyParams, TorusParams>;

struct TopologySpec {
  Family family = Family::kHxMesh;
  std::string name;
  FamilyParams params = HxMeshParams{};

  static TopologySpec hxmesh(HxMeshParams p, std::string name = {});
  static TopologySpec hyperx(int x, int y, int planes = 4, int radix = 64);
  static TopologySpec fat_tree(FatTreeParams p, std::string name = {});
  static TopologySpec dragonfly(DragonflyParams p, std::string name = {});
  static TopologySpec torus(TorusParams p, std::string name = {});
};

// Leaf split for a tapered fat tree: taper is upper/lower bandwidth ratio.
FatTreeParams fat_tree_from_taper(int endpoints, double taper, int planes = 16,
                                  int radix = 64);

struct Node {
  NodeKind kind = NodeKind::kAccelerator;
  std::int16_t plane = -1;  // switches only; accelerators span all planes
  std::int8_t level = 0;  // switch tier, 1 = attached to accelerators
  Dim dim = Dim::kNone;
  std::int32_t group = -1;  // connector line, dragonfly group or leaf index
  std::int32_t physical = -1;  // physical switch id
  std::int32_t gx = -1;  // accelerator grid column
  std::int32_t gy = -1;  // accelerator grid row
};

struct Link {
  NodeId u = kNoNode;
  NodeId v = kNoNode;
  std::int16_t plane = 0;
  Medium medium = Medium::kPcb;
  Port u_port = Port::kNone;
  Port v_port = Port::kNone;
  double capacity_gbps = kLinkGbps;
};

struct Adjacent {
  LinkId link;
  NodeId neighbor;
};

struct BoardCoord {
  int row = 0;
  int col = 0;
  friend bool operator==(const BoardCoord&, const BoardCoord&) = default;
};

class Topology {
 public:
  struct Layout {
    int planes = 1;
    int radix = 64;
    int board_a = 1;
    int board_b = 1;
    int grid_width = 0;  // accelerator grid, 0 when the family has none
    int grid_height = 0;
  };

  Topology(TopologySpec spec, Layout layout, std::vector<Node> nodes,
           std::vector<Link> links);

  const TopologySpec& spec() const { return spec_; }
  Family family() const { return spec_.family; }
  bool is_hxmesh() const {
    return family() == Family::kHxMesh || family() == Family::kHyperX;
  }
  bool has_ports() const { return is_hxmesh() || family() == Family::kTorus2d; }
  const Layout& layout() const { return layout_; }
  int planes() const { return layout_.planes; }
  int radix() const { return layout_.radix; }

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Link> links() const { return links_; }
  const Node& node(NodeId n) const { return nodes_[static_cast<std::size_t>(n)]; }
  const Link& link(LinkId l) const { return links_[static_cast<std::size_t>(l)]; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  bool is_accelerator(NodeId n) const {
    return node(n).kind == NodeKind::kAccelerator;
  }

  // Accelerators occupy ids [0, accelerator_count()).
  int accelerator_count() const { return accelerators_; }
  NodeId accelerator_at(int gx, int gy) const;
  BoardCoord board_of(NodeId acc) const;
  int board_rows() const;
  int board_cols() const;

  std::span<const Adjacent> neighbors(NodeId n, int plane) const;
  NodeId other_end(LinkId l, NodeId from) const {
    const Link& k = link(l);
    return k.u == from ? k.v : k.u;
  }
  Port port_at(LinkId l, NodeId at) const {
    const Link& k = link(l);
    return k.u == at ? k.u_port : k.v_port;
  }
  // Link at an accelerator port in a plane, -1 if unused.
  LinkId port_link(NodeId acc, int plane, Port p) const;

 private:
  TopologySpec spec_;
  Layout layout_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  int accelerators_ = 0;
  std::vector<std::vector<std::int32_t>> offsets_;  // per plane
  std::vector<std::vector<Adjacent>> adjacency_;  // per plane
};

Topology build_topology(const TopologySpec& spec);

enum class FindingKind { kPortBudget, kRadix, kPlaneCrossing, kDisconnected };
const char* to_string(FindingKind k);

struct Finding {
  FindingKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
};

ValidationReport validate_topology(const Topology& t);

// BFS hop count between two nodes inside one plane.
int hop_distance(const Topology& t, NodeId src, NodeId dst, int plane = 0);

// Hop counts from src to every node in a plane, -1 when unreachable.
std::vector<int> bfs_distances(const Topology& t, NodeId src, int plane = 0);

}  // namespace hxmesh
