#include "floodroute/lodging.hpp"

#include <algorithm>

#include <json.hpp>

#include "floodroute/routing.hpp"

namespace floodroute {

std::vector<Poi> filter_lodging(const std::vector<Poi>& pois, const FloodMask& mask) {
  std::vector<Poi> out;
  for (const auto& p : pois) {
    if (p.kind != PoiKind::Lodging && p.kind != PoiKind::Shelter) continue;
    auto cell = world_to_cell(mask.geometry, p.position.lon, p.position.lat);
    if (cell && mask(*cell)) continue;
    out.push_back(p);
  }
  return out;
}

std::vector<LodgingOption> rank_lodging(const std::vector<Poi>& dry, const RoadGraph& graph,
                                        const HazardOverlay& overlay, const std::string& origin,
                                        double snap_radius_m) {
  if (!graph.node_index(origin)) throw RoutingError("unknown origin node '" + origin + "'");
  std::vector<LodgingOption> options;
  for (const auto& poi : dry) {
    LodgingOption opt;
    opt.poi = poi;
    opt.snap_node = nearest_node(graph, poi.position.lon, poi.position.lat, snap_radius_m);
    if (opt.snap_node) {
      if (auto route = shortest_route(graph, overlay, {origin, *opt.snap_node, {}})) {
        opt.reachable = true;
        opt.route_length_m = route->total_length_m;
      }
    }
    options.push_back(std::move(opt));
  }
  std::sort(options.begin(), options.end(), [](const LodgingOption& a, const LodgingOption& b) {
    if (a.reachable != b.reachable) return a.reachable;
    if (a.reachable && *a.route_length_m != *b.route_length_m) {
      return *a.route_length_m < *b.route_length_m;
    }
    return a.poi.id < b.poi.id;
  });
  return options;
}

std::string lodging_to_json(const std::vector<LodgingOption>& options) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& o : options) {
    nlohmann::json item = {{"id", o.poi.id},
                           {"name", o.poi.name},
                           {"kind", to_string(o.poi.kind)},
                           {"flooded", o.flooded},
                           {"reachable", o.reachable},
                           {"route_length_m", nullptr},
                           {"snap_node", nullptr}};
    if (o.route_length_m) item["route_length_m"] = *o.route_length_m;
    if (o.snap_node) item["snap_node"] = *o.snap_node;
    arr.push_back(std::move(item));
  }
  return arr.dump() + "\n";
}

}  // namespace floodroute
