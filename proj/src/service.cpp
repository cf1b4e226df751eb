#include "floodroute/service.hpp"

#include <charconv>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

namespace floodroute {

using nlohmann::json;

std::optional<LonLat> parse_lonlat(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
    return std::nullopt;
  }
  auto parse = [](std::string_view s) -> std::optional<double> {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
      return std::nullopt;
    }
    return v;
  };
  const std::string_view all(text);
  auto lon = parse(all.substr(0, comma));
  auto lat = parse(all.substr(comma + 1));
  if (!lon || !lat || std::abs(*lat) > 90.0 || std::abs(*lon) > 180.0) return std::nullopt;
  return LonLat{*lon, *lat};
}

namespace {

json flood_features(const FloodMask& mask, const std::string& source_tag) {
  json features = json::array();
  const auto& g = mask.geometry;
  for (Eigen::Index r = 0; r < g.rows; ++r) {
    for (Eigen::Index c = 0; c < g.cols; ++c) {
      if (!mask.flooded(r, c)) continue;
      const double x0 = g.x_origin + static_cast<double>(c) * g.cell_size;
      const double y0 = g.y_origin + static_cast<double>(r) * g.cell_size;
      const double x1 = g.x_origin + static_cast<double>(c + 1) * g.cell_size;
      const double y1 = g.y_origin + static_cast<double>(r + 1) * g.cell_size;
      json ring = json::array({json::array({x0, y0}), json::array({x1, y0}), json::array({x1, y1}),
                               json::array({x0, y1}), json::array({x0, y0})});
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Polygon"}, {"coordinates", json::array({ring})}}},
                          {"properties", {{"source", source_tag}, {"col", c}, {"row", r}}}});
    }
  }
  return features;
}

ServiceResponse respond(int status, json body) { return {status, body.dump() + "\n"}; }

ServiceResponse no_scenario() {
  return respond(409, {{"version", 0}, {"error", "no scenario"}});
}

}  // namespace

std::string flood_layer_geojson(const FloodMask& mask, const std::string& source_tag) {
  json doc = {{"type", "FeatureCollection"}, {"features", flood_features(mask, source_tag)}};
  return doc.dump() + "\n";
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Service::Snapshot> Service::snapshot() const {
  std::shared_lock lock(state_mutex_);
  return active_;
}

std::uint64_t Service::version() const {
  std::shared_lock lock(state_mutex_);
  return version_;
}

std::uint64_t Service::swap_in(Scenario scenario) {
  auto next = std::make_shared<Snapshot>();
  next->overlay = prepare_overlay(scenario);
  next->scenario = std::move(scenario);
  std::unique_lock lock(state_mutex_);
  next->version = ++version_;
  active_ = std::move(next);
  return version_;
}

std::uint64_t Service::install(Scenario scenario) {
  std::lock_guard load_lock(load_mutex_);
  return swap_in(std::move(scenario));
}

ServiceResponse Service::handle_load(const std::string& manifest_path) {
  std::lock_guard load_lock(load_mutex_);
  try {
    const std::uint64_t v = swap_in(load_scenario(std::filesystem::path(manifest_path)));
    return respond(200, {{"status", "ok"}, {"version", v}});
  } catch (const std::exception& e) {
    return respond(422, {{"status", "error"}, {"error", e.what()}, {"version", version()}});
  }
}

ServiceResponse Service::handle_health() const {
  auto snap = snapshot();
  if (!snap) return respond(200, {{"status", "ok"}, {"version", 0}, {"scenario_name", nullptr}});
  return respond(200, {{"status", "ok"}, {"version", snap->version}, {"scenario_name", snap->scenario.name}});
}

ServiceResponse Service::handle_flood(std::optional<double> level_override_ft) const {
  auto snap = snapshot();
  if (!snap) return no_scenario();
  if (level_override_ft && !std::isfinite(*level_override_ft)) {
    return respond(400, {{"version", snap->version}, {"error", "level_ft must be finite"}});
  }
  const FloodMask mask = level_override_ft
                             ? fused_mask_at(snap->scenario, feet_to_meters(*level_override_ft))
                             : snap->scenario.fused();
  json body = {{"type", "FeatureCollection"},
               {"features", flood_features(mask, "fused")},
               {"version", snap->version},
               {"scenario", snap->scenario.name},
               {"level_ft", level_override_ft ? json(*level_override_ft) : json(nullptr)}};
  return respond(200, std::move(body));
}

ServiceResponse Service::handle_route(const LonLat& origin, const LonLat& destination,
                                      const std::set<std::string>& closed_edges) const {
  auto snap = snapshot();
  if (!snap) return no_scenario();
  const auto& sc = snap->scenario;
  json body = {{"version", snap->version}, {"scenario", sc.name}};

  auto from = nearest_node(sc.graph, origin.lon, origin.lat, sc.params.snap_radius_m);
  auto to = nearest_node(sc.graph, destination.lon, destination.lat, sc.params.snap_radius_m);
  if (!from || !to) {
    body["route"] = nullptr;
    body["reason"] = "no_nearby_road";
    return respond(200, std::move(body));
  }
  body["origin_node"] = *from;
  body["destination_node"] = *to;
  try {
    auto route = shortest_route(sc.graph, snap->overlay, {*from, *to, closed_edges});
    if (!route) {
      body["route"] = nullptr;
      body["reason"] = "unreachable";
    } else {
      body["route"] = json::parse(route_to_geojson(*route, sc.graph));
    }
  } catch (const RoutingError& e) {
    return respond(400, {{"version", snap->version}, {"error", e.what()}});
  }
  return respond(200, std::move(body));
}

ServiceResponse Service::handle_lodging(const LonLat& origin) const {
  auto snap = snapshot();
  if (!snap) return no_scenario();
  const auto& sc = snap->scenario;
  auto from = nearest_node(sc.graph, origin.lon, origin.lat, sc.params.snap_radius_m);
  if (!from) {
    return respond(422, {{"version", snap->version}, {"error", "no_nearby_road"}, {"reason", "no_nearby_road"}});
  }
  const auto options = rank_lodging(filter_lodging(sc.pois, sc.fused()), sc.graph, snap->overlay,
                                    *from, sc.params.snap_radius_m);
  return respond(200, {{"version", snap->version},
                       {"scenario", sc.name},
                       {"origin_node", *from},
                       {"options", json::parse(lodging_to_json(options))}});
}

// ---------------------------------------------------------------------------

struct HttpFrontend::Impl {
  Service& service;
  httplib::Server server;
  int port = -1;

  explicit Impl(Service& s) : service(s) {}
};

namespace {

void send(httplib::Response& res, const ServiceResponse& out) {
  res.status = out.status;
  res.set_content(out.body, "application/json");
}

void bad_request(httplib::Response& res, Service& service, const std::string& what) {
  json body = {{"version", service.version()}, {"error", what}};
  send(res, {400, body.dump() + "\n"});
}

}  // namespace

HttpFrontend::HttpFrontend(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& svr = impl_->server;
  Service& svc = impl_->service;

  // SO_REUSEPORT (httplib's default) would let a second server share the port.
  svr.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  svr.Get("/health", [&svc](const httplib::Request&, httplib::Response& res) {
    send(res, svc.handle_health());
  });

  svr.Post("/load", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::string path;
    if (req.has_param("manifest_path")) {
      path = req.get_param_value("manifest_path");
    } else {
      const json body = json::parse(req.body, nullptr, false);
      if (!body.is_object() || !body.contains("manifest_path") || !body["manifest_path"].is_string()) {
        return bad_request(res, svc, "body must be {\"manifest_path\": string}");
      }
      path = body["manifest_path"].get<std::string>();
    }
    send(res, svc.handle_load(path));
  });

  svr.Get("/flood", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::optional<double> level;
    if (req.has_param("level_ft")) {
      const std::string text = req.get_param_value("level_ft");
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        return bad_request(res, svc, "level_ft must be a number");
      }
      level = v;
    }
    send(res, svc.handle_flood(level));
  });

  svr.Get("/route", [&svc](const httplib::Request& req, httplib::Response& res) {
    auto from = parse_lonlat(req.get_param_value("from"));
    auto to = parse_lonlat(req.get_param_value("to"));
    if (!from || !to) return bad_request(res, svc, "from and to must be lon,lat");
    std::set<std::string> closed;
    const auto n = req.get_param_value_count("close");
    for (std::size_t i = 0; i < n; ++i) closed.insert(req.get_param_value("close", i));
    send(res, svc.handle_route(*from, *to, closed));
  });

  svr.Get("/lodging", [&svc](const httplib::Request& req, httplib::Response& res) {
    auto from = parse_lonlat(req.get_param_value("from"));
    if (!from) return bad_request(res, svc, "from must be lon,lat");
    send(res, svc.handle_lodging(*from));
  });
}

HttpFrontend::~HttpFrontend() { stop(); }

bool HttpFrontend::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
    return impl_->port > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  impl_->port = port;
  return true;
}

int HttpFrontend::port() const { return impl_->port; }

bool HttpFrontend::run() { return impl_->server.listen_after_bind(); }

void HttpFrontend::stop() {
  if (impl_) impl_->server.stop();
}

void HttpFrontend::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace floodroute
