#include "floodroute/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace floodroute {

using nlohmann::json;

namespace {

[[noreturn]] void bad_manifest(const std::string& what) { throw ScenarioError("manifest", what); }

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) bad_manifest(where + " has unknown key '" + key + "'");
  }
}

std::string required_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_string()) {
    bad_manifest(where + " needs a string '" + key + "'");
  }
  return obj.at(key).get<std::string>();
}

double number_or(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) bad_manifest(std::string("params.") + key + " must be a number");
  return obj.at(key).get<double>();
}

}  // namespace

Manifest parse_manifest(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad_manifest(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad_manifest("must be a JSON object");
  reject_unknown_keys(doc, {"name", "dem_path", "class_grid_paths", "roadnet_path", "params"},
                      "manifest");

  Manifest m;
  m.name = required_string(doc, "name", "manifest");
  m.dem_path = required_string(doc, "dem_path", "manifest");
  m.roadnet_path = required_string(doc, "roadnet_path", "manifest");

  if (doc.contains("class_grid_paths")) {
    const auto& arr = doc.at("class_grid_paths");
    if (!arr.is_array()) bad_manifest("class_grid_paths must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "class_grid_paths[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) bad_manifest(where + " must be an object");
      reject_unknown_keys(arr[i], {"path", "legend_path", "water_class"}, where);
      ClassGridSource src;
      src.path = required_string(arr[i], "path", where);
      src.legend_path = required_string(arr[i], "legend_path", where);
      if (arr[i].contains("water_class")) src.water_class = required_string(arr[i], "water_class", where);
      m.class_grids.push_back(std::move(src));
    }
  }

  if (!doc.contains("params") || !doc.at("params").is_object()) bad_manifest("needs a 'params' object");
  const json& p = doc.at("params");
  reject_unknown_keys(p,
                      {"water_level_m", "water_level_ft", "seed_fraction", "snap_radius_m",
                       "block_infrastructure"},
                      "params");
  const bool has_m = p.contains("water_level_m");
  const bool has_ft = p.contains("water_level_ft");
  if (has_m == has_ft) bad_manifest("params must give exactly one of water_level_m or water_level_ft");
  m.params.water_level = has_ft ? WaterLevel{number_or(p, "water_level_ft", 0.0), LevelUnit::Feet}
                                : WaterLevel{number_or(p, "water_level_m", 0.0), LevelUnit::Meters};
  m.params.seed_fraction = number_or(p, "seed_fraction", kDefaultSeedFraction);
  m.params.snap_radius_m = number_or(p, "snap_radius_m", kDefaultSnapRadiusM);
  if (p.contains("block_infrastructure")) {
    if (!p.at("block_infrastructure").is_boolean()) bad_manifest("params.block_infrastructure must be a boolean");
    m.params.block_infrastructure = p.at("block_infrastructure").get<bool>();
  }

  if (!std::isfinite(m.params.water_level.value)) bad_manifest("water level must be finite");
  if (!(m.params.seed_fraction > 0.0 && m.params.seed_fraction <= 1.0)) {
    bad_manifest("params.seed_fraction must lie in (0, 1]");
  }
  if (!(m.params.snap_radius_m > 0.0) || !std::isfinite(m.params.snap_radius_m)) {
    bad_manifest("params.snap_radius_m must be positive");
  }
  return m;
}

std::string manifest_to_json(const Manifest& m) {
  json grids = json::array();
  for (const auto& g : m.class_grids) {
    grids.push_back({{"path", g.path}, {"legend_path", g.legend_path}, {"water_class", g.water_class}});
  }
  json params = {{"seed_fraction", m.params.seed_fraction},
                 {"snap_radius_m", m.params.snap_radius_m},
                 {"block_infrastructure", m.params.block_infrastructure}};
  params[m.params.water_level.unit == LevelUnit::Feet ? "water_level_ft" : "water_level_m"] =
      m.params.water_level.value;
  json doc = {{"name", m.name},
              {"dem_path", m.dem_path},
              {"class_grid_paths", std::move(grids)},
              {"roadnet_path", m.roadnet_path},
              {"params", std::move(params)}};
  return doc.dump(2) + "\n";
}

std::string to_string(MaskSource source) {
  switch (source) {
    case MaskSource::DemModel:
      return "dem_model";
    case MaskSource::Segmentation:
      return "segmentation";
    case MaskSource::Fused:
      return "fused";
  }
  return "fused";
}

// ---------------------------------------------------------------------------

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <typename Fn>
auto load_component(const std::string& component, const std::filesystem::path& path, Fn&& fn) {
  if (!std::filesystem::exists(path)) {
    throw ScenarioError(component, "file not found: '" + path.string() + "'");
  }
  try {
    return fn(path);
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(component, "'" + path.string() + "': " + e.what());
  }
}

FloodMask dem_model_mask(const Scenario& s, double level_m) {
  return connected_inundation(s.dem, level_m, s.seeds);
}

}  // namespace

Scenario load_scenario(const Manifest& manifest, const std::filesystem::path& base_dir) {
  Scenario s;
  s.name = manifest.name;
  s.params = manifest.params;

  s.dem = load_component("dem", resolve(base_dir, manifest.dem_path),
                         [](const auto& p) { return load_ascii_grid(p); });
  try {
    s.seeds = default_seeds(s.dem, s.params.seed_fraction);
  } catch (const std::exception& e) {
    throw ScenarioError("dem", e.what());
  }

  auto network = load_component("roadnet", resolve(base_dir, manifest.roadnet_path),
                                 [](const auto& p) { return load_roadnet(p); });
  s.graph = std::move(network.graph);
  s.pois = std::move(network.pois);

  s.masks.push_back({"dem_model", MaskSource::DemModel, dem_model_mask(s, s.params.water_level_m())});

  for (std::size_t i = 0; i < manifest.class_grids.size(); ++i) {
    const auto& src = manifest.class_grids[i];
    const std::string component = "class_grid_paths[" + std::to_string(i) + "]";
    const Legend legend = load_component(component, resolve(base_dir, src.legend_path),
                                         [](const auto& p) { return load_legend(p); });
    const ClassGrid grid = load_component(component, resolve(base_dir, src.path),
                                          [&](const auto& p) { return ingest_class_grid(p, legend); });
    std::set<std::string> blocking{src.water_class};
    if (s.params.block_infrastructure && grid.has_class("infrastructure")) {
      blocking.insert("infrastructure");
    }
    FloodMask mask;
    try {
      mask = align_mask(class_to_flood_mask(grid, blocking), s.dem.geometry);
    } catch (const std::exception& e) {
      throw ScenarioError(component, e.what());
    }
    if (!(mask.geometry == s.dem.geometry)) {
      throw ScenarioError(component, "mask is not on the DEM frame after alignment");
    }
    s.masks.push_back({src.path, MaskSource::Segmentation, std::move(mask)});
  }

  FloodMask fused = s.masks.front().mask;
  for (std::size_t i = 1; i < s.masks.size(); ++i) fused = fuse_masks(fused, s.masks[i].mask);
  s.masks.push_back({"fused", MaskSource::Fused, std::move(fused)});
  return s;
}

Scenario load_scenario(std::istream& manifest, const std::filesystem::path& base_dir) {
  std::ostringstream ss;
  ss << manifest.rdbuf();
  return load_scenario(parse_manifest(ss.str()), base_dir);
}

Scenario load_scenario(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw ScenarioError("manifest", "file not found: '" + manifest_path.string() + "'");
  return load_scenario(in, manifest_path.parent_path());
}

FloodMask fused_mask_at(const Scenario& s, double water_level_m) {
  FloodMask fused = dem_model_mask(s, water_level_m);
  for (const auto& m : s.masks) {
    if (m.source == MaskSource::Segmentation) fused = fuse_masks(fused, m.mask);
  }
  return fused;
}

HazardOverlay prepare_overlay(const Scenario& scenario) {
  return apply_flood_overlay(scenario.graph, scenario.fused());
}

}  // namespace floodroute
