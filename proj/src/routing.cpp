#include "floodroute/routing.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <tuple>

#include <json.hpp>

namespace floodroute {

using nlohmann::json;

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::size_t require_node(const RoadGraph& graph, const std::string& id) {
  auto i = graph.node_index(id);
  if (!i) throw RoutingError("unknown node id '" + id + "'");
  return *i;
}

}  // namespace

std::optional<Route> shortest_route(const RoadGraph& graph, const HazardOverlay& overlay,
                                    const RouteRequest& request) {
  const std::size_t source = require_node(graph, request.origin);
  const std::size_t target = require_node(graph, request.destination);
  if (overlay.blocked.size() != graph.edges().size()) {
    throw ContractError("hazard overlay was built for a different graph");
  }

  const std::size_t n_edges = graph.edges().size();
  std::vector<bool> usable(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) usable[e] = !overlay.is_blocked(e);
  for (const auto& id : request.closed_edges) {
    auto e = graph.edge_index(id);
    if (!e) throw RoutingError("unknown edge id '" + id + "'");
    usable[*e] = false;
  }

  if (source == target) return Route{{request.origin}, {}, 0.0, 0.0};

  const std::size_t n = graph.nodes().size();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> via_edge(n, kNone);
  std::vector<bool> settled(n, false);

  // Min-heap on (cost, node index); node indices follow id order.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);

  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (settled[u]) continue;
    settled[u] = true;
    if (u == target) break;
    for (std::size_t e : graph.incident(u)) {
      if (!usable[e]) continue;
      const std::size_t v = graph.from_index(e) == u ? graph.to_index(e) : graph.from_index(e);
      if (settled[v]) continue;
      const double nd = d + graph.edges()[e].cost();
      if (nd < dist[v]) {
        dist[v] = nd;
        via_edge[v] = e;
        heap.emplace(nd, v);
      }
    }
  }
  if (!settled[target]) return std::nullopt;

  std::vector<std::size_t> edge_path;
  for (std::size_t v = target; v != source;) {
    const std::size_t e = via_edge[v];
    edge_path.push_back(e);
    v = graph.from_index(e) == v ? graph.to_index(e) : graph.from_index(e);
  }
  std::reverse(edge_path.begin(), edge_path.end());

  Route route;
  std::size_t at = source;
  route.node_ids.push_back(graph.nodes()[at].id);
  for (std::size_t e : edge_path) {
    const auto& edge = graph.edges()[e];
    at = graph.from_index(e) == at ? graph.to_index(e) : graph.from_index(e);
    route.node_ids.push_back(graph.nodes()[at].id);
    route.edge_ids.push_back(edge.id);
    route.total_cost += edge.cost();
    route.total_length_m += edge.length_m;
  }
  return route;
}

std::optional<Route> backup_route(const RoadGraph& graph, const HazardOverlay& overlay,
                                  const RouteRequest& request, const Route& primary,
                                  const std::set<std::string>& newly_closed) {
  const bool hits_primary = std::any_of(primary.edge_ids.begin(), primary.edge_ids.end(),
                                        [&](const auto& id) { return newly_closed.count(id) > 0; });
  if (!hits_primary) return primary;
  RouteRequest next = request;
  next.closed_edges.insert(newly_closed.begin(), newly_closed.end());
  return shortest_route(graph, overlay, next);
}

// ---------------------------------------------------------------------------

std::string route_to_geojson(const Route& route, const RoadGraph& graph) {
  json features = json::array();
  for (std::size_t i = 0; i < route.edge_ids.size(); ++i) {
    auto idx = graph.edge_index(route.edge_ids[i]);
    if (!idx) throw RoutingError("route edge '" + route.edge_ids[i] + "' is not in the graph");
    const auto& edge = graph.edges()[*idx];
    json coords = json::array();
    for (const auto& p : edge.polyline) coords.push_back(json::array({p.lon, p.lat}));
    json props = {{"edge_id", edge.id},
                  {"length_m", edge.length_m},
                  {"strength", edge.strength},
                  {"reversed", edge.from != route.node_ids[i]}};
    if (edge.name) props["name"] = *edge.name;
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "LineString"}, {"coordinates", std::move(coords)}}},
                        {"properties", std::move(props)}});
  }
  features.push_back({{"type", "Feature"},
                      {"geometry", nullptr},
                      {"properties",
                       {{"summary", true},
                        {"node_ids", route.node_ids},
                        {"edge_ids", route.edge_ids},
                        {"total_cost", route.total_cost},
                        {"total_length_m", route.total_length_m}}}});
  json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump() + "\n";
}

std::string route_summary_json(const Route& route) {
  json doc = {{"node_ids", route.node_ids},
              {"edge_ids", route.edge_ids},
              {"total_cost", route.total_cost},
              {"total_length_m", route.total_length_m}};
  return doc.dump() + "\n";
}

Route route_from_geojson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw RoutingError(std::string("route GeoJSON does not parse: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array() || doc["features"].empty()) {
    throw RoutingError("route GeoJSON must be a non-empty FeatureCollection");
  }
  const json& props = doc["features"].back().at("properties");
  if (!props.value("summary", false)) throw RoutingError("route GeoJSON lacks a summary feature");
  Route route;
  try {
    route.node_ids = props.at("node_ids").get<std::vector<std::string>>();
    route.edge_ids = props.at("edge_ids").get<std::vector<std::string>>();
    route.total_cost = props.at("total_cost").get<double>();
    route.total_length_m = props.at("total_length_m").get<double>();
  } catch (const json::exception& e) {
    throw RoutingError(std::string("route summary is malformed: ") + e.what());
  }
  return route;
}

}  // namespace floodroute
