#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>

#include "floodroute/lodging.hpp"
#include "floodroute/routing.hpp"
#include "floodroute/scenario.hpp"

namespace floodroute {

/// "lon,lat" -> LonLat; nullopt unless both parts are finite numbers.
std::optional<LonLat> parse_lonlat(const std::string& text);

/// Flooded cells as a FeatureCollection of closed cell-footprint polygons.
std::string flood_layer_geojson(const FloodMask& mask, const std::string& source_tag);

/// Status code plus canonical JSON body. Every body carries "version".
struct ServiceResponse {
  int status = 200;
  std::string body;
};

/// Scenario state behind the HTTP endpoints. Readers take an immutable
/// snapshot; a load builds the next snapshot off-lock and swaps it in.
class Service {
 public:
  ServiceResponse handle_load(const std::string& manifest_path);
  ServiceResponse handle_flood(std::optional<double> level_override_ft) const;
  ServiceResponse handle_route(const LonLat& origin, const LonLat& destination,
                               const std::set<std::string>& closed_edges) const;
  ServiceResponse handle_lodging(const LonLat& origin) const;
  ServiceResponse handle_health() const;

  /// Installs an already-loaded scenario as the next version.
  std::uint64_t install(Scenario scenario);
  std::uint64_t version() const;

 private:
  struct Snapshot {
    std::uint64_t version = 0;
    Scenario scenario;
    HazardOverlay overlay;
  };

  std::shared_ptr<const Snapshot> snapshot() const;
  std::uint64_t swap_in(Scenario scenario);

  mutable std::shared_mutex state_mutex_;
  std::shared_ptr<const Snapshot> active_;
  std::uint64_t version_ = 0;
  std::mutex load_mutex_;
};

/// cpp-httplib binding for Service:
///   GET /health, POST /load {"manifest_path"}, GET /flood[?level_ft=],
///   GET /route?from=lon,lat&to=lon,lat[&close=id]..., GET /lodging?from=lon,lat
class HttpFrontend {
 public:
  explicit HttpFrontend(Service& service);
  ~HttpFrontend();
  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  /// Port 0 picks a free port. Returns false if the address is taken.
  bool bind(const std::string& host, int port);
  int port() const;
  /// Serves until stop(); returns false if the server failed.
  bool run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace floodroute
