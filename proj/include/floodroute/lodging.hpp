#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floodroute/inundation.hpp"
#include "floodroute/roadnet.hpp"

namespace floodroute {

struct LodgingOption {
  Poi poi;
  bool flooded = false;
  bool reachable = false;
  std::optional<double> route_length_m;  ///< set iff reachable
  std::optional<std::string> snap_node;

  bool operator==(const LodgingOption&) const = default;
};

/// Lodging and shelter POIs whose mask cell is dry. POIs outside the mask
/// extent are kept: no observation is not evidence of flooding.
std::vector<Poi> filter_lodging(const std::vector<Poi>& pois, const FloodMask& mask);

/// Reachable options by ascending route length (ties by id), then the
/// unreachable and unsnappable ones by id. Throws RoutingError for an
/// unknown origin.
std::vector<LodgingOption> rank_lodging(const std::vector<Poi>& dry, const RoadGraph& graph,
                                        const HazardOverlay& overlay, const std::string& origin,
                                        double snap_radius_m = kDefaultSnapRadiusM);

/// JSON array of {id, name, kind, flooded, reachable, route_length_m, snap_node}.
std::string lodging_to_json(const std::vector<LodgingOption>& options);

}  // namespace floodroute
