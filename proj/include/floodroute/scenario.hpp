#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "floodroute/imagery.hpp"
#include "floodroute/inundation.hpp"
#include "floodroute/raster.hpp"
#include "floodroute/roadnet.hpp"

namespace floodroute {

enum class LevelUnit { Meters, Feet };

/// Water level as stated by the operator; converted to meters at use.
struct WaterLevel {
  double value = 0.0;
  LevelUnit unit = LevelUnit::Meters;

  double meters() const { return unit == LevelUnit::Feet ? feet_to_meters(value) : value; }
  bool operator==(const WaterLevel&) const = default;
};

struct ClassGridSource {
  std::string path;
  std::string legend_path;
  std::string water_class = "water";

  bool operator==(const ClassGridSource&) const = default;
};

struct ScenarioParams {
  WaterLevel water_level;
  double seed_fraction = kDefaultSeedFraction;
  double snap_radius_m = kDefaultSnapRadiusM;
  /// Cells classed "infrastructure" also block roads when set.
  bool block_infrastructure = false;

  double water_level_m() const { return water_level.meters(); }
  bool operator==(const ScenarioParams&) const = default;
};

/// Scenario manifest: which files make up the layers, plus parameters.
/// Relative paths resolve against the manifest's directory.
struct Manifest {
  std::string name;
  std::string dem_path;
  std::vector<ClassGridSource> class_grids;
  std::string roadnet_path;
  ScenarioParams params;

  bool operator==(const Manifest&) const = default;
};

class ScenarioError : public Error {
 public:
  ScenarioError(std::string component, const std::string& what)
      : Error(component + ": " + what), component_(std::move(component)) {}

  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

/// Throws ScenarioError("manifest", ...) on schema or range violations,
/// including both or neither of water_level_m / water_level_ft.
Manifest parse_manifest(const std::string& json_text);
std::string manifest_to_json(const Manifest& manifest);

enum class MaskSource { DemModel, Segmentation, Fused };
std::string to_string(MaskSource source);

struct NamedMask {
  std::string name;
  MaskSource source = MaskSource::DemModel;
  FloodMask mask;

  bool operator==(const NamedMask&) const = default;
};

/// The five input layers loaded, aligned to the DEM frame, and fused.
/// `masks` holds the DEM-model mask first, segmentation masks next, and the
/// fused mask last.
struct Scenario {
  std::string name;
  RasterGrid dem;
  SeedSet seeds;
  std::vector<NamedMask> masks;
  RoadGraph graph;
  std::vector<Poi> pois;
  ScenarioParams params;

  const FloodMask& dem_model() const { return masks.front().mask; }
  const FloodMask& fused() const { return masks.back().mask; }

  bool operator==(const Scenario&) const = default;
};

Scenario load_scenario(const Manifest& manifest, const std::filesystem::path& base_dir);
Scenario load_scenario(std::istream& manifest, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& manifest_path);

/// Fused mask with the DEM-model layer recomputed at `water_level_m`.
FloodMask fused_mask_at(const Scenario& scenario, double water_level_m);

HazardOverlay prepare_overlay(const Scenario& scenario);

}  // namespace floodroute
