#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <tuple>

#include "floodroute/error.hpp"

namespace floodroute {

/// Geographic position in WGS84 degrees.
struct LonLat {
  double lon = 0.0;
  double lat = 0.0;

  bool operator==(const LonLat&) const = default;
};

/// Frame of a north-up grid with square cells. The origin is the lower-left
/// (south-west) corner of the extent.
struct GridGeometry {
  Eigen::Index cols = 1;
  Eigen::Index rows = 1;
  double x_origin = 0.0;
  double y_origin = 0.0;
  double cell_size = 1.0;

  bool operator==(const GridGeometry&) const = default;

  Eigen::Index size() const { return cols * rows; }
  double x_max() const { return x_origin + static_cast<double>(cols) * cell_size; }
  double y_max() const { return y_origin + static_cast<double>(rows) * cell_size; }

  /// Throws ContractError unless cols, rows >= 1 and cell_size > 0.
  void validate() const;
};

/// Zero-based cell address; row 0 is the southernmost row.
struct CellIndex {
  Eigen::Index col = 0;
  Eigen::Index row = 0;

  bool operator==(const CellIndex&) const = default;
  // Row-major order: (row, col).
  friend auto operator<=>(const CellIndex& a, const CellIndex& b) {
    return std::tie(a.row, a.col) <=> std::tie(b.row, b.col);
  }
};

template <typename Scalar>
using GridArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense grid of cells bound to a geometry. `values(row, col)`, row 0 south.
template <typename Scalar>
struct Grid {
  GridGeometry geometry;
  GridArray<Scalar> values;
  Scalar nodata{};

  Grid() : values(1, 1) { values.setZero(); }

  Grid(const GridGeometry& geom, Scalar fill, Scalar nodata_value)
      : geometry(geom), values(geom.rows, geom.cols), nodata(nodata_value) {
    geometry.validate();
    values.setConstant(fill);
  }

  Scalar& operator()(const CellIndex& c) { return values(c.row, c.col); }
  const Scalar& operator()(const CellIndex& c) const { return values(c.row, c.col); }

  bool contains(const CellIndex& c) const {
    return c.col >= 0 && c.row >= 0 && c.col < geometry.cols && c.row < geometry.rows;
  }
  bool is_nodata(const CellIndex& c) const { return (*this)(c) == nodata; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.geometry == b.geometry && a.nodata == b.nodata &&
           a.values.rows() == b.values.rows() && a.values.cols() == b.values.cols() &&
           (a.values == b.values).all();
  }
};

/// Elevation (meters) or numeric class-code grid.
using RasterGrid = Grid<double>;

inline constexpr double kDefaultNodata = -9999.0;

// ---------------------------------------------------------------------------
// Coordinate transforms

/// Cell whose footprint holds the point, or nullopt outside the extent.
/// Interior boundaries go to the higher-index cell; the east and north
/// edges of the extent are inclusive.
std::optional<CellIndex> world_to_cell(const GridGeometry& geometry, double lon, double lat);

/// Center of an in-bounds cell. Throws ContractError otherwise.
LonLat cell_to_world(const GridGeometry& geometry, const CellIndex& cell);

/// Nearest-neighbour resample: every target cell takes the source cell under
/// its center, or `fill` when the center is outside the source extent.
template <typename Scalar>
Grid<Scalar> resample_nearest(const Grid<Scalar>& src, const GridGeometry& target, Scalar fill) {
  Grid<Scalar> out(target, fill, src.nodata);
  if (target == src.geometry) {
    out.values = src.values;
    return out;
  }
  for (Eigen::Index r = 0; r < target.rows; ++r) {
    for (Eigen::Index c = 0; c < target.cols; ++c) {
      const LonLat center = cell_to_world(target, {c, r});
      if (auto hit = world_to_cell(src.geometry, center.lon, center.lat)) {
        out.values(r, c) = src(*hit);
      }
    }
  }
  return out;
}

template <typename Scalar>
Grid<Scalar> resample_nearest(const Grid<Scalar>& src, const GridGeometry& target) {
  return resample_nearest(src, target, src.nodata);
}

// ---------------------------------------------------------------------------
// ESRI ASCII grid

class AsciiGridError : public Error {
 public:
  enum class Kind { MalformedHeader, ValueCount, NonNumeric };

  AsciiGridError(Kind kind, std::size_t line, const std::string& what);

  Kind kind() const { return kind_; }
  /// 1-based line number in the source.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

RasterGrid load_ascii_grid(std::istream& source);
RasterGrid load_ascii_grid(const std::filesystem::path& path);

/// Canonical writer: fixed header order, shortest round-trip numbers,
/// north row first, single spaces, '\n' line ends.
void save_ascii_grid(const RasterGrid& grid, std::ostream& sink);
void save_ascii_grid(const RasterGrid& grid, const std::filesystem::path& path);
std::string to_ascii_grid(const RasterGrid& grid);

/// Shortest decimal text that parses back to exactly `value`.
std::string to_shortest_string(double value);

}  // namespace floodroute
