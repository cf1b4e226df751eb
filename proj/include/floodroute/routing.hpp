#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "floodroute/roadnet.hpp"

namespace floodroute {

/// Path through the road graph. `edge_ids[i]` joins `node_ids[i]` and `node_ids[i + 1]`.
struct Route {
  std::vector<std::string> node_ids;
  std::vector<std::string> edge_ids;
  double total_cost = 0.0;      ///< sum of length_m * strength
  double total_length_m = 0.0;  ///< sum of length_m

  bool empty() const { return edge_ids.empty(); }
  bool operator==(const Route&) const = default;
};

struct RouteRequest {
  std::string origin;
  std::string destination;
  std::set<std::string> closed_edges;  ///< operator closures on top of the overlay
};

class RoutingError : public Error {
 public:
  using Error::Error;
};

/// Dijkstra over the passable edges. Equal-cost frontier entries are settled
/// smaller node id first; parallel edges resolve to the cheaper, then smaller id.
/// Returns nullopt when the destination is unreachable. Throws RoutingError
/// for ids absent from the graph.
std::optional<Route> shortest_route(const RoadGraph& graph, const HazardOverlay& overlay,
                                    const RouteRequest& request);

/// Recomputes the route with `newly_closed` added to the request closures.
/// Returns `primary` unchanged when none of the new closures lie on it.
std::optional<Route> backup_route(const RoadGraph& graph, const HazardOverlay& overlay,
                                  const RouteRequest& request, const Route& primary,
                                  const std::set<std::string>& newly_closed);

/// FeatureCollection: one LineString per edge, then a summary Feature.
std::string route_to_geojson(const Route& route, const RoadGraph& graph);
/// Canonical one-line JSON {node_ids, edge_ids, total_cost, total_length_m}.
std::string route_summary_json(const Route& route);
/// Recovers the Route from the summary Feature of `route_to_geojson` output.
Route route_from_geojson(const std::string& text);

}  // namespace floodroute
