#include "floodroute/raster.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace floodroute {

void GridGeometry::validate() const {
  if (cols < 1 || rows < 1) {
    throw ContractError("grid geometry needs at least one column and one row");
  }
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw ContractError("grid cell size must be positive and finite");
  }
  if (!std::isfinite(x_origin) || !std::isfinite(y_origin)) {
    throw ContractError("grid origin must be finite");
  }
}

namespace {

// Index along one axis such that origin + k*cell <= v < origin + (k+1)*cell,
// with the far edge of the extent folded into the last cell.
std::optional<Eigen::Index> axis_index(double origin, double cell, Eigen::Index n, double v) {
  if (!(v >= origin)) return std::nullopt;
  const double upper = origin + static_cast<double>(n) * cell;
  if (v > upper) return std::nullopt;
  if (v == upper) return n - 1;
  auto k = static_cast<Eigen::Index>(std::floor((v - origin) / cell));
  k = std::clamp<Eigen::Index>(k, 0, n - 1);
  // floor of the quotient can be one off from the footprint test near edges
  while (k > 0 && v < origin + static_cast<double>(k) * cell) --k;
  while (k + 1 < n && v >= origin + static_cast<double>(k + 1) * cell) ++k;
  return k;
}

}  // namespace

std::optional<CellIndex> world_to_cell(const GridGeometry& geometry, double lon, double lat) {
  auto col = axis_index(geometry.x_origin, geometry.cell_size, geometry.cols, lon);
  if (!col) return std::nullopt;
  auto row = axis_index(geometry.y_origin, geometry.cell_size, geometry.rows, lat);
  if (!row) return std::nullopt;
  return CellIndex{*col, *row};
}

LonLat cell_to_world(const GridGeometry& geometry, const CellIndex& cell) {
  if (cell.col < 0 || cell.row < 0 || cell.col >= geometry.cols || cell.row >= geometry.rows) {
    throw ContractError("cell (" + std::to_string(cell.col) + ", " + std::to_string(cell.row) +
                        ") is outside a " + std::to_string(geometry.cols) + "x" +
                        std::to_string(geometry.rows) + " grid");
  }
  return {geometry.x_origin + (static_cast<double>(cell.col) + 0.5) * geometry.cell_size,
          geometry.y_origin + (static_cast<double>(cell.row) + 0.5) * geometry.cell_size};
}

// ---------------------------------------------------------------------------

AsciiGridError::AsciiGridError(Kind kind, std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

std::string to_shortest_string(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error("number formatting failed");
  return std::string(buf.data(), end);
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> parse_number(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

constexpr std::array<std::string_view, 6> kHeaderKeys = {"ncols",     "nrows",    "xllcorner",
                                                         "yllcorner", "cellsize", "nodata_value"};

bool is_header_key(const std::string& key) {
  return std::find(kHeaderKeys.begin(), kHeaderKeys.end(), key) != kHeaderKeys.end();
}

}  // namespace

RasterGrid load_ascii_grid(std::istream& source) {
  using Kind = AsciiGridError::Kind;

  std::map<std::string, double> header;
  std::vector<std::pair<std::size_t, std::string>> data_lines;
  std::string line;
  std::size_t line_no = 0;
  bool in_header = true;

  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (in_header) {
      const std::string key = lower(tokens.front());
      if (is_header_key(key)) {
        if (tokens.size() != 2) {
          throw AsciiGridError(Kind::MalformedHeader, line_no,
                               "header line '" + key + "' must hold exactly one value");
        }
        if (header.count(key)) {
          throw AsciiGridError(Kind::MalformedHeader, line_no, "duplicate header key '" + key + "'");
        }
        auto v = parse_number(tokens[1]);
        if (!v) {
          throw AsciiGridError(Kind::MalformedHeader, line_no,
                               "header value for '" + key + "' is not a number");
        }
        header[key] = *v;
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(tokens.front().front())) && header.size() < 5) {
        throw AsciiGridError(Kind::MalformedHeader, line_no,
                             "unknown header key '" + std::string(tokens.front()) + "'");
      }
      in_header = false;
    }
    data_lines.emplace_back(line_no, line);
  }

  const std::size_t header_end = data_lines.empty() ? line_no + 1 : data_lines.front().first;
  for (std::string_view key : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize"}) {
    if (!header.count(std::string(key))) {
      throw AsciiGridError(Kind::MalformedHeader, header_end,
                           "missing header key '" + std::string(key) + "'");
    }
  }
  auto as_count = [&](const char* key) {
    const double v = header.at(key);
    if (v < 1 || v != std::floor(v) || v > 1e9) {
      throw AsciiGridError(Kind::MalformedHeader, header_end,
                           std::string(key) + " must be a positive integer");
    }
    return static_cast<Eigen::Index>(v);
  };

  GridGeometry geom;
  geom.cols = as_count("ncols");
  geom.rows = as_count("nrows");
  geom.x_origin = header.at("xllcorner");
  geom.y_origin = header.at("yllcorner");
  geom.cell_size = header.at("cellsize");
  if (!(geom.cell_size > 0.0)) {
    throw AsciiGridError(Kind::MalformedHeader, header_end, "cellsize must be positive");
  }
  const double nodata = header.count("nodata_value") ? header.at("nodata_value") : kDefaultNodata;

  RasterGrid grid(geom, nodata, nodata);
  Eigen::Index file_row = 0;
  for (const auto& [no, text] : data_lines) {
    auto tokens = split_ws(text);
    if (file_row >= geom.rows) {
      throw AsciiGridError(Kind::ValueCount, no,
                           "more than nrows=" + std::to_string(geom.rows) + " data rows");
    }
    if (static_cast<Eigen::Index>(tokens.size()) != geom.cols) {
      throw AsciiGridError(Kind::ValueCount, no,
                           "row " + std::to_string(file_row) + " has " +
                               std::to_string(tokens.size()) + " values, expected ncols=" +
                               std::to_string(geom.cols));
    }
    const Eigen::Index row = geom.rows - 1 - file_row;
    for (Eigen::Index c = 0; c < geom.cols; ++c) {
      auto v = parse_number(tokens[static_cast<std::size_t>(c)]);
      if (!v) {
        throw AsciiGridError(Kind::NonNumeric, no,
                             "token '" + std::string(tokens[static_cast<std::size_t>(c)]) +
                                 "' in column " + std::to_string(c) + " is not a finite number");
      }
      grid.values(row, c) = *v;
    }
    ++file_row;
  }
  if (file_row != geom.rows) {
    throw AsciiGridError(Kind::ValueCount, line_no + 1,
                         "found " + std::to_string(file_row) + " data rows, expected nrows=" +
                             std::to_string(geom.rows));
  }
  return grid;
}

RasterGrid load_ascii_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open grid file '" + path.string() + "'");
  return load_ascii_grid(in);
}

void save_ascii_grid(const RasterGrid& grid, std::ostream& sink) {
  const auto& g = grid.geometry;
  sink << "ncols " << g.cols << '\n'
       << "nrows " << g.rows << '\n'
       << "xllcorner " << to_shortest_string(g.x_origin) << '\n'
       << "yllcorner " << to_shortest_string(g.y_origin) << '\n'
       << "cellsize " << to_shortest_string(g.cell_size) << '\n'
       << "NODATA_value " << to_shortest_string(grid.nodata) << '\n';
  for (Eigen::Index r = g.rows - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < g.cols; ++c) {
      if (c) sink << ' ';
      sink << to_shortest_string(grid.values(r, c));
    }
    sink << '\n';
  }
}

void save_ascii_grid(const RasterGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write grid file '" + path.string() + "'");
  save_ascii_grid(grid, out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string to_ascii_grid(const RasterGrid& grid) {
  std::ostringstream os;
  save_ascii_grid(grid, os);
  return os.str();
}

}  // namespace floodroute
