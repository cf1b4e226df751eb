#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "floodroute/inundation.hpp"
#include "floodroute/raster.hpp"

namespace floodroute {

/// Class code -> class name. Several codes may share one name.
using Legend = std::map<int, std::string>;

/// Names every class grid legend carries; missing ones get the smallest free codes.
inline const std::vector<std::string>& standard_class_names() {
  static const std::vector<std::string> names{"other", "water", "building", "road"};
  return names;
}

/// Class emitted for pixels matching the shared building/road map-tile colour.
inline constexpr const char* kBuildingOrRoad = "building_or_road";

Legend complete_legend(Legend legend);

struct ClassGrid {
  GridGeometry geometry;
  GridArray<int> classes;
  Legend legend;

  const std::string& name_at(const CellIndex& c) const { return legend.at(classes(c.row, c.col)); }
  bool has_class(const std::string& name) const;

  friend bool operator==(const ClassGrid& a, const ClassGrid& b) {
    return a.geometry == b.geometry && a.legend == b.legend &&
           a.classes.rows() == b.classes.rows() && a.classes.cols() == b.classes.cols() &&
           (a.classes == b.classes).all();
  }
};

class ClassGridError : public Error {
 public:
  using Error::Error;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

/// Row-major pixels, y = 0 is the top (northern) image row.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
  GridGeometry geometry;

  const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct ColorRule {
  std::string class_name;
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  int tolerance = 0;  ///< max per-channel absolute difference

  bool matches(const Rgb& px) const;
};

/// Building and road features on zoom >= 17 map tiles share this colour.
ColorRule map_tile_building_rule();

/// Integer ASCII grid mapped through `legend` (completed with the standard names).
/// Throws ClassGridError naming the code and cell for unknown or non-integral codes.
ClassGrid ingest_class_grid(std::istream& source, const Legend& legend);
ClassGrid ingest_class_grid(const std::filesystem::path& grid_path, const Legend& legend);

void save_class_grid(const ClassGrid& grid, std::ostream& sink);

Legend parse_legend(const std::string& json_text);
Legend load_legend(const std::filesystem::path& path);
/// Canonical `{"code": "name", ...}` JSON, newline-terminated.
std::string legend_to_json(const Legend& legend);

/// First matching rule wins; unmatched pixels are "other".
ClassGrid classify_by_color(const RgbImage& image, const std::vector<ColorRule>& rules);

/// Flooded where the cell's class name is in `water_classes`.
/// Throws ClassGridError if any name is absent from the legend.
FloodMask class_to_flood_mask(const ClassGrid& grid, const std::set<std::string>& water_classes);
FloodMask class_to_flood_mask(const ClassGrid& grid, const std::string& water_class);

/// Nearest-neighbour alignment; cells outside the source extent are dry.
FloodMask align_mask(const FloodMask& mask, const GridGeometry& target);

std::vector<ColorRule> parse_color_rules(const std::string& json_text);

/// Binary PPM (P6, maxval 255). Geometry defaults to origin (0,0), cell size 1.
RgbImage read_ppm(std::istream& source);
void write_ppm(const RgbImage& image, std::ostream& sink);

/// PPM plus optional `<path>.geo` sidecar with xllcorner/yllcorner/cellsize lines.
RgbImage load_rgb_image(const std::filesystem::path& path);
void save_rgb_image(const RgbImage& image, const std::filesystem::path& path);

}  // namespace floodroute
