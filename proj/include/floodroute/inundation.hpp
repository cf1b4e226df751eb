#pragma once

#include <set>

#include "floodroute/raster.hpp"

namespace floodroute {

using MaskArray = GridArray<bool>;

/// Per-cell flooded verdicts bound to a grid frame.
struct FloodMask {
  GridGeometry geometry;
  MaskArray flooded;

  FloodMask() : flooded(MaskArray::Constant(1, 1, false)) {}
  explicit FloodMask(const GridGeometry& geom, bool fill = false)
      : geometry(geom), flooded(MaskArray::Constant(geom.rows, geom.cols, fill)) {
    geometry.validate();
  }

  bool operator()(const CellIndex& c) const { return flooded(c.row, c.col); }
  Eigen::Index count() const { return flooded.count(); }

  friend bool operator==(const FloodMask& a, const FloodMask& b) {
    return a.geometry == b.geometry && a.flooded.rows() == b.flooded.rows() &&
           a.flooded.cols() == b.flooded.cols() && (a.flooded == b.flooded).all();
  }
};

/// Cellwise `a` implies `b`. Throws GeometryMismatch on differing frames.
bool is_subset(const FloodMask& a, const FloodMask& b);

/// Hydrologic source cells for connected inundation, ordered by (row, col).
using SeedSet = std::set<CellIndex>;

inline constexpr double kFootInMeters = 0.3048;
inline constexpr double kDefaultSeedFraction = 0.02;

constexpr double feet_to_meters(double feet) { return feet * kFootInMeters; }

/// Bathtub model: every non-nodata cell strictly below the level floods.
FloodMask threshold_inundation(const RasterGrid& dem, double water_level_m);

/// Bathtub cells that are 4-connected to a below-level seed.
/// Throws ContractError for an empty or out-of-bounds seed set.
FloodMask connected_inundation(const RasterGrid& dem, double water_level_m, const SeedSet& seeds);

/// The ceil(fraction * n) lowest non-nodata cells, ties by (row, col).
SeedSet default_seeds(const RasterGrid& dem, double fraction = kDefaultSeedFraction);

/// Cellwise union.
FloodMask fuse_masks(const FloodMask& a, const FloodMask& b);

double flooded_fraction(const FloodMask& mask);

/// 0/1 grid (nodata -9999) for file output.
RasterGrid mask_to_grid(const FloodMask& mask);
/// Non-zero, non-nodata cells become flooded.
FloodMask grid_to_mask(const RasterGrid& grid);

}  // namespace floodroute
