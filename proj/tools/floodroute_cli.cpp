// floodroute: batch driver for every pipeline stage.
//
// Exit codes: 0 success, 1 domain failure (unreachable, load failure, ...),
// 2 usage or input-format error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <pthread.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "floodroute/imagery.hpp"
#include "floodroute/inundation.hpp"
#include "floodroute/lodging.hpp"
#include "floodroute/routing.hpp"
#include "floodroute/scenario.hpp"
#include "floodroute/service.hpp"

namespace fr = floodroute;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;

struct Exit {
  int code;
};

[[noreturn]] void fail(int code, const std::string& message) {
  std::cerr << "floodroute: " << message << '\n';
  throw Exit{code};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kDomainFailure, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) fail(kDomainFailure, "cannot write '" + path + "'");
}

fr::LonLat point_arg(const std::string& text, const char* flag) {
  auto p = fr::parse_lonlat(text);
  if (!p) fail(kUsage, std::string(flag) + " expects LON,LAT, got '" + text + "'");
  return *p;
}

fr::Scenario scenario_arg(const std::string& path) {
  try {
    return fr::load_scenario(std::filesystem::path(path));
  } catch (const std::exception& e) {
    fail(kDomainFailure, e.what());
  }
}

std::string snap_or_fail(const fr::Scenario& sc, const fr::LonLat& p) {
  auto node = fr::nearest_node(sc.graph, p.lon, p.lat, sc.params.snap_radius_m);
  if (!node) {
    std::cout << json{{"route", nullptr}, {"reason", "no_nearby_road"}}.dump() << '\n';
    fail(kDomainFailure, "no_nearby_road");
  }
  return *node;
}

// ---------------------------------------------------------------------------

struct InundateArgs {
  std::string dem;
  std::optional<double> level_ft;
  std::optional<double> level_m;
  double seeds_fraction = fr::kDefaultSeedFraction;
  std::string mode = "connected";
  std::string out;
};

int run_inundate(const InundateArgs& a) {
  if (a.level_ft.has_value() == a.level_m.has_value()) {
    fail(kUsage, "give exactly one of --level-ft or --level-m");
  }
  const double level = a.level_ft ? fr::feet_to_meters(*a.level_ft) : *a.level_m;
  fr::RasterGrid dem;
  try {
    dem = fr::load_ascii_grid(std::filesystem::path(a.dem));
  } catch (const std::exception& e) {
    fail(kDomainFailure, e.what());
  }
  fr::FloodMask mask;
  try {
    mask = a.mode == "threshold" ? fr::threshold_inundation(dem, level)
                                 : fr::connected_inundation(dem, level, fr::default_seeds(dem, a.seeds_fraction));
  } catch (const fr::ContractError& e) {
    fail(kUsage, e.what());
  }
  write_text(a.out, fr::to_ascii_grid(fr::mask_to_grid(mask)));
  const double fraction = fr::flooded_fraction(mask);
  std::cout << json{{"flooded_cells", mask.count()},
                    {"flooded_fraction", fraction},
                    {"mode", a.mode},
                    {"total_cells", mask.flooded.size()},
                    {"water_level_m", level}}
                   .dump()
            << '\n';
  std::cerr << "flooded " << mask.count() << " of " << mask.flooded.size() << " cells at "
            << level << " m\n";
  return kOk;
}

struct ClassifyArgs {
  std::string image;
  std::string rules;
  std::string out;
};

int run_classify(const ClassifyArgs& a) {
  std::vector<fr::ColorRule> rules;
  try {
    rules = fr::parse_color_rules(read_text(a.rules));
  } catch (const fr::Error& e) {
    fail(kUsage, e.what());
  }
  fr::RgbImage image;
  try {
    image = fr::load_rgb_image(a.image);
  } catch (const std::exception& e) {
    fail(kDomainFailure, e.what());
  }
  const fr::ClassGrid grid = fr::classify_by_color(image, rules);
  std::ostringstream grid_text;
  fr::save_class_grid(grid, grid_text);
  write_text(a.out, grid_text.str());
  const std::string legend_path = std::filesystem::path(a.out).replace_extension(".legend.json").string();
  write_text(legend_path, fr::legend_to_json(grid.legend));

  json counts = json::object();
  for (const auto& [code, name] : grid.legend) counts[name] = 0;
  for (Eigen::Index i = 0; i < grid.classes.size(); ++i) {
    counts[grid.legend.at(grid.classes.data()[i])] = counts[grid.legend.at(grid.classes.data()[i])].get<long>() + 1;
  }
  std::cout << json{{"class_counts", counts}, {"grid", a.out}, {"legend", legend_path}}.dump() << '\n';
  return kOk;
}

struct OverlayArgs {
  std::string scenario;
  std::string out;
};

int run_overlay(const OverlayArgs& a) {
  const fr::Scenario sc = scenario_arg(a.scenario);
  const fr::HazardOverlay overlay = fr::prepare_overlay(sc);
  const std::string report = fr::overlay_report_json(overlay);
  write_text(a.out, report);
  std::cout << json::parse(report).at("summary").dump() << '\n';
  std::cerr << overlay.blocked_ids().size() << " of " << overlay.edge_ids.size()
            << " edges blocked\n";
  return kOk;
}

struct RouteArgs {
  std::string scenario;
  std::string from;
  std::string to;
  std::vector<std::string> close;
  std::string geojson;
};

int run_route(const RouteArgs& a) {
  const fr::LonLat from = point_arg(a.from, "--from");
  const fr::LonLat to = point_arg(a.to, "--to");
  const fr::Scenario sc = scenario_arg(a.scenario);
  const fr::HazardOverlay overlay = fr::prepare_overlay(sc);
  const std::string origin = snap_or_fail(sc, from);
  const std::string destination = snap_or_fail(sc, to);

  std::optional<fr::Route> route;
  try {
    route = fr::shortest_route(sc.graph, overlay,
                               {origin, destination, {a.close.begin(), a.close.end()}});
  } catch (const fr::RoutingError& e) {
    fail(kUsage, e.what());
  }
  if (!route) {
    std::cout << json{{"route", nullptr}, {"reason", "unreachable"}}.dump() << '\n';
    fail(kDomainFailure, "unreachable");
  }
  if (!a.geojson.empty()) write_text(a.geojson, fr::route_to_geojson(*route, sc.graph));
  std::cout << fr::route_summary_json(*route);
  std::cerr << "route";
  for (const auto& n : route->node_ids) std::cerr << ' ' << n;
  std::cerr << "\nlength " << route->total_length_m << " m, cost " << route->total_cost << '\n';
  return kOk;
}

struct LodgingArgs {
  std::string scenario;
  std::string from;
};

int run_lodging(const LodgingArgs& a) {
  const fr::LonLat from = point_arg(a.from, "--from");
  const fr::Scenario sc = scenario_arg(a.scenario);
  const fr::HazardOverlay overlay = fr::prepare_overlay(sc);
  auto origin = fr::nearest_node(sc.graph, from.lon, from.lat, sc.params.snap_radius_m);
  if (!origin) fail(kDomainFailure, "no_nearby_road");
  const auto options = fr::rank_lodging(fr::filter_lodging(sc.pois, sc.fused()), sc.graph, overlay,
                                        *origin, sc.params.snap_radius_m);
  std::cout << fr::lodging_to_json(options);
  return kOk;
}

struct ServeArgs {
  std::string scenario;
  std::string listen = "127.0.0.1:8080";
};

int run_serve(const ServeArgs& a) {
  const auto colon = a.listen.rfind(':');
  int port = -1;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      port = std::stoi(a.listen.substr(colon + 1), &used);
      if (used != a.listen.size() - colon - 1) port = -1;
    } catch (const std::exception&) {
      port = -1;
    }
  }
  if (port < 0 || port > 65535) fail(kUsage, "--listen expects ADDR:PORT, got '" + a.listen + "'");
  const std::string host = a.listen.substr(0, colon);

  fr::Service service;
  service.install(scenario_arg(a.scenario));

  // Signals are taken synchronously on a dedicated thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  fr::HttpFrontend http(service);
  if (!http.bind(host, port)) fail(kDomainFailure, "cannot bind " + a.listen);

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    http.stop();
  });
  std::cout << json{{"listening", host + ":" + std::to_string(http.port())}, {"version", service.version()}}.dump()
            << std::endl;
  const bool ok = http.run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::cerr << "floodroute: server stopped\n";
  return ok ? kOk : kDomainFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flood-aware evacuation routing: inundation masks, road overlays, routes, lodging"};
  app.require_subcommand(1);
  std::function<int()> action;

  InundateArgs inundate;
  auto* cmd = app.add_subcommand("inundate", "Flood mask from a DEM at a water level");
  cmd->add_option("--dem", inundate.dem, "ESRI ASCII grid DEM (meters)")->required();
  auto* ft = cmd->add_option("--level-ft", inundate.level_ft, "Water level in feet");
  auto* m = cmd->add_option("--level-m", inundate.level_m, "Water level in meters");
  ft->excludes(m);
  cmd->add_option("--seeds-fraction", inundate.seeds_fraction,
                  "Share of lowest cells used as flood sources (connected mode)")
      ->capture_default_str();
  cmd->add_option("--mode", inundate.mode, "threshold or connected")
      ->check(CLI::IsMember({"threshold", "connected"}))
      ->capture_default_str();
  cmd->add_option("--out", inundate.out, "Output 0/1 mask grid")->required();
  cmd->callback([&] { action = [&] { return run_inundate(inundate); }; });

  ClassifyArgs classify;
  cmd = app.add_subcommand("classify", "Class grid from an RGB tile by colour rules");
  cmd->add_option("--image", classify.image, "PPM (P6) image; optional <image>.geo sidecar")->required();
  cmd->add_option("--rules", classify.rules, "JSON list of {class_name, r, g, b, tolerance}")->required();
  cmd->add_option("--out", classify.out, "Output class grid; legend goes to <out stem>.legend.json")
      ->required();
  cmd->callback([&] { action = [&] { return run_classify(classify); }; });

  OverlayArgs overlay;
  cmd = app.add_subcommand("overlay", "Blocked-edge report for a scenario");
  cmd->add_option("--scenario", overlay.scenario, "Scenario manifest JSON")->required();
  cmd->add_option("--out", overlay.out, "Output report JSON")->required();
  cmd->callback([&] { action = [&] { return run_overlay(overlay); }; });

  RouteArgs route;
  cmd = app.add_subcommand("route", "Shortest flood-safe route between two points");
  cmd->add_option("--scenario", route.scenario, "Scenario manifest JSON")->required();
  cmd->add_option("--from", route.from, "Origin LON,LAT")->required();
  cmd->add_option("--to", route.to, "Destination LON,LAT")->required();
  cmd->add_option("--close", route.close, "Edge id to close (repeatable)")->allow_extra_args(false);
  cmd->add_option("--geojson", route.geojson, "Also write the route as GeoJSON");
  cmd->callback([&] { action = [&] { return run_route(route); }; });

  LodgingArgs lodging;
  cmd = app.add_subcommand("lodging", "Ranked flood-safe lodging from a point");
  cmd->add_option("--scenario", lodging.scenario, "Scenario manifest JSON")->required();
  cmd->add_option("--from", lodging.from, "Origin LON,LAT")->required();
  cmd->callback([&] { action = [&] { return run_lodging(lodging); }; });

  ServeArgs serve;
  cmd = app.add_subcommand("serve", "HTTP service with the scenario preloaded");
  cmd->add_option("--scenario", serve.scenario, "Scenario manifest JSON")->required();
  cmd->add_option("--listen", serve.listen, "ADDR:PORT (port 0 picks a free port)")->capture_default_str();
  cmd->callback([&] { action = [&] { return run_serve(serve); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    return action();
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "floodroute: " << e.what() << '\n';
    return kDomainFailure;
  }
}
