#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "floodroute/inundation.hpp"
#include "floodroute/raster.hpp"

namespace floodroute {

inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kDefaultSnapRadiusM = 500.0;

using Polyline = std::vector<LonLat>;

struct RoadNode {
  std::string id;
  LonLat position;

  bool operator==(const RoadNode&) const = default;
};

struct RoadEdge {
  std::string id;
  std::string from;
  std::string to;
  Polyline polyline;
  double length_m = 0.0;
  double strength = 1.0;  ///< multiplier on length; traversal cost = length_m * strength
  std::optional<std::string> name;

  double cost() const { return length_m * strength; }
  bool operator==(const RoadEdge&) const = default;
};

class RoadnetError : public Error {
 public:
  enum class Kind {
    Schema,
    DuplicateId,
    DanglingEndpoint,
    ShortPolyline,
    EndpointMismatch,
    NonPositiveLength,
    NonPositiveStrength,
    BadPoiKind,
  };

  RoadnetError(Kind kind, std::string offending_id, const std::string& what)
      : Error(what), kind_(kind), id_(std::move(offending_id)) {}

  Kind kind() const { return kind_; }
  const std::string& offending_id() const { return id_; }

 private:
  Kind kind_;
  std::string id_;
};

/// Undirected road graph. Nodes and edges are held sorted by id, so indices
/// order the same way ids do.
class RoadGraph {
 public:
  RoadGraph() = default;
  /// Validates every structural invariant; throws RoadnetError.
  RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges);

  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }

  std::optional<std::size_t> node_index(const std::string& id) const;
  std::optional<std::size_t> edge_index(const std::string& id) const;
  const RoadNode& node(const std::string& id) const;
  const RoadEdge& edge(const std::string& id) const;

  /// Edge indices incident to a node (self-loops listed once).
  const std::vector<std::size_t>& incident(std::size_t node) const { return incident_[node]; }
  std::size_t from_index(std::size_t edge) const { return endpoints_[edge].first; }
  std::size_t to_index(std::size_t edge) const { return endpoints_[edge].second; }

  friend bool operator==(const RoadGraph& a, const RoadGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::unordered_map<std::string, std::size_t> node_lookup_;
  std::unordered_map<std::string, std::size_t> edge_lookup_;
  std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
  std::vector<std::vector<std::size_t>> incident_;
};

enum class PoiKind { Shelter, Lodging, Building };

std::string to_string(PoiKind kind);
std::optional<PoiKind> parse_poi_kind(const std::string& text);

struct Poi {
  std::string id;
  PoiKind kind = PoiKind::Building;
  LonLat position;
  std::string name;

  bool operator==(const Poi&) const = default;
};

/// Road graph plus the points of interest shipped in the same file.
struct RoadNetwork {
  RoadGraph graph;
  std::vector<Poi> pois;

  bool operator==(const RoadNetwork&) const = default;
};

/// Parses the scenario road JSON; lengths are computed from the polylines.
RoadNetwork load_roadnet(std::istream& source);
RoadNetwork load_roadnet(const std::filesystem::path& path);
/// Canonical JSON for a road network (lengths are not written).
std::string roadnet_to_json(const RoadNetwork& network);

double haversine_m(const LonLat& a, const LonLat& b);

/// Great-circle length of a polyline. Throws ContractError for < 2 points.
double edge_length(const Polyline& polyline);

/// Every in-grid cell whose closed footprint touches the polyline.
std::set<CellIndex> edge_cells(const Polyline& polyline, const GridGeometry& geometry);

/// Per-edge blocked verdicts, indexed like `RoadGraph::edges()`.
struct HazardOverlay {
  std::vector<std::string> edge_ids;
  std::vector<bool> blocked;
  GridGeometry source_mask_geometry;

  bool is_blocked(std::size_t edge_index) const { return blocked[edge_index]; }
  /// Throws ContractError for an id the overlay has no entry for.
  bool is_blocked(const std::string& edge_id) const;
  std::set<std::string> blocked_ids() const;

  bool operator==(const HazardOverlay&) const = default;
};

/// An edge is blocked when any cell it touches is flooded.
HazardOverlay apply_flood_overlay(const RoadGraph& graph, const FloodMask& mask);

/// Canonical JSON {"blocked": {id: bool}, "summary": {blocked, passable, total}}.
std::string overlay_report_json(const HazardOverlay& overlay);

/// Overlay with nothing blocked.
HazardOverlay passable_overlay(const RoadGraph& graph);

/// Closest node within `max_radius_m`, ties to the smaller id.
std::optional<std::string> nearest_node(const RoadGraph& graph, double lon, double lat,
                                        double max_radius_m = kDefaultSnapRadiusM);

struct GraphReport {
  std::vector<std::vector<std::string>> components;  ///< each sorted; ordered by first id
  std::vector<std::string> isolated_nodes;
  std::vector<std::string> zero_length_edges;  ///< polyline has no geometric extent

  std::size_t component_count() const { return components.size(); }
};

GraphReport validate_graph(const RoadGraph& graph);

}  // namespace floodroute
