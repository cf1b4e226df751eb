#include "floodroute/inundation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <tuple>
#include <vector>

namespace floodroute {

namespace {

void require_same_frame(const GridGeometry& a, const GridGeometry& b) {
  if (!(a == b)) {
    throw GeometryMismatch(
        "flood masks are on different grid frames; align one with align_mask first");
  }
}

}  // namespace

bool is_subset(const FloodMask& a, const FloodMask& b) {
  require_same_frame(a.geometry, b.geometry);
  return (!a.flooded || b.flooded).all();
}

FloodMask threshold_inundation(const RasterGrid& dem, double water_level_m) {
  FloodMask mask(dem.geometry);
  mask.flooded = (dem.values < water_level_m) && (dem.values != dem.nodata);
  return mask;
}

FloodMask connected_inundation(const RasterGrid& dem, double water_level_m, const SeedSet& seeds) {
  if (seeds.empty()) throw ContractError("connected inundation needs at least one seed cell");
  for (const auto& s : seeds) {
    if (!dem.contains(s)) {
      throw ContractError("seed cell (" + std::to_string(s.col) + ", " + std::to_string(s.row) +
                          ") is outside the DEM");
    }
  }

  const FloodMask below = threshold_inundation(dem, water_level_m);
  FloodMask mask(dem.geometry);
  std::deque<CellIndex> frontier;
  for (const auto& s : seeds) {
    if (below(s) && !mask(s)) {
      mask.flooded(s.row, s.col) = true;
      frontier.push_back(s);
    }
  }

  constexpr std::array<std::pair<int, int>, 4> kSteps{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
  while (!frontier.empty()) {
    const CellIndex cur = frontier.front();
    frontier.pop_front();
    for (auto [dc, dr] : kSteps) {
      const CellIndex next{cur.col + dc, cur.row + dr};
      if (!dem.contains(next) || mask(next) || !below(next)) continue;
      mask.flooded(next.row, next.col) = true;
      frontier.push_back(next);
    }
  }
  return mask;
}

SeedSet default_seeds(const RasterGrid& dem, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ContractError("seed fraction must lie in (0, 1]");
  }
  std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> cells;
  for (Eigen::Index r = 0; r < dem.geometry.rows; ++r) {
    for (Eigen::Index c = 0; c < dem.geometry.cols; ++c) {
      const double v = dem.values(r, c);
      if (v != dem.nodata) cells.emplace_back(v, r, c);
    }
  }
  if (cells.empty()) throw ContractError("cannot pick seeds on an all-nodata DEM");

  // Products like 0.2 * 5 may land a hair above an integer.
  const double want = fraction * static_cast<double>(cells.size());
  auto take = static_cast<std::size_t>(std::ceil(want - 1e-9 * want));
  take = std::clamp<std::size_t>(take, 1, cells.size());

  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(take), cells.end());
  SeedSet seeds;
  for (std::size_t i = 0; i < take; ++i) {
    seeds.insert(CellIndex{std::get<2>(cells[i]), std::get<1>(cells[i])});
  }
  return seeds;
}

FloodMask fuse_masks(const FloodMask& a, const FloodMask& b) {
  require_same_frame(a.geometry, b.geometry);
  FloodMask out(a.geometry);
  out.flooded = a.flooded || b.flooded;
  return out;
}

double flooded_fraction(const FloodMask& mask) {
  return static_cast<double>(mask.count()) / static_cast<double>(mask.flooded.size());
}

RasterGrid mask_to_grid(const FloodMask& mask) {
  RasterGrid grid(mask.geometry, 0.0, kDefaultNodata);
  grid.values = mask.flooded.cast<double>();
  return grid;
}

FloodMask grid_to_mask(const RasterGrid& grid) {
  FloodMask mask(grid.geometry);
  mask.flooded = (grid.values != 0.0) && (grid.values != grid.nodata);
  return mask;
}

}  // namespace floodroute
