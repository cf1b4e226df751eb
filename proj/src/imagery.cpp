#include "floodroute/imagery.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace floodroute {

using nlohmann::json;

Legend complete_legend(Legend legend) {
  std::set<std::string> present;
  for (const auto& [code, name] : legend) present.insert(name);
  int next = 0;
  for (const auto& name : standard_class_names()) {
    if (present.count(name)) continue;
    while (legend.count(next)) ++next;
    legend.emplace(next, name);
  }
  return legend;
}

bool ClassGrid::has_class(const std::string& name) const {
  for (const auto& [code, n] : legend) {
    if (n == name) return true;
  }
  return false;
}

bool ColorRule::matches(const Rgb& px) const {
  return std::abs(int(px.r) - int(r)) <= tolerance && std::abs(int(px.g) - int(g)) <= tolerance &&
         std::abs(int(px.b) - int(b)) <= tolerance;
}

ColorRule map_tile_building_rule() { return {kBuildingOrRoad, 241, 241, 241, 0}; }

// ---------------------------------------------------------------------------

ClassGrid ingest_class_grid(std::istream& source, const Legend& legend) {
  const RasterGrid raw = load_ascii_grid(source);
  ClassGrid out;
  out.geometry = raw.geometry;
  out.legend = complete_legend(legend);
  out.classes.resize(raw.geometry.rows, raw.geometry.cols);
  for (Eigen::Index r = 0; r < raw.geometry.rows; ++r) {
    for (Eigen::Index c = 0; c < raw.geometry.cols; ++c) {
      const double v = raw.values(r, c);
      const std::string where =
          " at cell (col " + std::to_string(c) + ", row " + std::to_string(r) + ")";
      if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ClassGridError("class code " + to_shortest_string(v) + where + " is not an integer");
      }
      const int code = static_cast<int>(v);
      if (!out.legend.count(code)) {
        throw ClassGridError("class code " + std::to_string(code) + where +
                             " is not in the legend");
      }
      out.classes(r, c) = code;
    }
  }
  return out;
}

ClassGrid ingest_class_grid(const std::filesystem::path& grid_path, const Legend& legend) {
  std::ifstream in(grid_path, std::ios::binary);
  if (!in) throw Error("cannot open class grid '" + grid_path.string() + "'");
  return ingest_class_grid(in, legend);
}

void save_class_grid(const ClassGrid& grid, std::ostream& sink) {
  RasterGrid raw(grid.geometry, 0.0, kDefaultNodata);
  raw.values = grid.classes.cast<double>();
  save_ascii_grid(raw, sink);
}

Legend parse_legend(const std::string& json_text) {
  Legend legend;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ClassGridError(std::string("legend is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ClassGridError("legend must be a JSON object {code: name}");
  for (const auto& [key, value] : doc.items()) {
    char* end = nullptr;
    const long code = std::strtol(key.c_str(), &end, 10);
    if (key.empty() || *end != '\0') {
      throw ClassGridError("legend key '" + key + "' is not an integer code");
    }
    if (!value.is_string()) throw ClassGridError("legend entry '" + key + "' must be a string");
    legend[static_cast<int>(code)] = value.get<std::string>();
  }
  return legend;
}

Legend load_legend(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open legend '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_legend(ss.str());
}

std::string legend_to_json(const Legend& legend) {
  json doc = json::object();
  for (const auto& [code, name] : legend) doc[std::to_string(code)] = name;
  return doc.dump() + "\n";
}

// ---------------------------------------------------------------------------

ClassGrid classify_by_color(const RgbImage& image, const std::vector<ColorRule>& rules) {
  ClassGrid out;
  out.geometry = image.geometry;
  out.legend = complete_legend({});

  std::map<std::string, int> code_of;
  for (const auto& [code, name] : out.legend) code_of.emplace(name, code);
  std::vector<int> rule_code;
  for (const auto& rule : rules) {
    auto it = code_of.find(rule.class_name);
    if (it == code_of.end()) {
      const int code = out.legend.rbegin()->first + 1;
      out.legend.emplace(code, rule.class_name);
      it = code_of.emplace(rule.class_name, code).first;
    }
    rule_code.push_back(it->second);
  }
  const int other = code_of.at("other");

  out.classes.resize(image.height, image.width);
  for (int y = 0; y < image.height; ++y) {
    const Eigen::Index row = image.height - 1 - y;
    for (int x = 0; x < image.width; ++x) {
      const Rgb& px = image.at(x, y);
      int code = other;
      for (std::size_t i = 0; i < rules.size(); ++i) {
        if (rules[i].matches(px)) {
          code = rule_code[i];
          break;
        }
      }
      out.classes(row, x) = code;
    }
  }
  return out;
}

FloodMask class_to_flood_mask(const ClassGrid& grid, const std::set<std::string>& water_classes) {
  std::set<int> codes;
  for (const auto& name : water_classes) {
    if (!grid.has_class(name)) {
      throw ClassGridError("class '" + name + "' is not in the class grid legend");
    }
  }
  for (const auto& [code, name] : grid.legend) {
    if (water_classes.count(name)) codes.insert(code);
  }
  FloodMask mask(grid.geometry);
  mask.flooded = grid.classes.unaryExpr([&](int code) { return codes.count(code) > 0; });
  return mask;
}

FloodMask class_to_flood_mask(const ClassGrid& grid, const std::string& water_class) {
  return class_to_flood_mask(grid, std::set<std::string>{water_class});
}

FloodMask align_mask(const FloodMask& mask, const GridGeometry& target) {
  Grid<std::uint8_t> levels(mask.geometry, 0, 0);
  levels.values = mask.flooded.cast<std::uint8_t>();
  const auto aligned = resample_nearest<std::uint8_t>(levels, target, 0);
  FloodMask out(target);
  out.flooded = aligned.values != 0;
  return out;
}

std::vector<ColorRule> parse_color_rules(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("colour rules are not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error("colour rules must be a JSON array");
  std::vector<ColorRule> rules;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    const std::string where = "colour rule " + std::to_string(i);
    if (!item.is_object()) throw Error(where + " must be an object");
    ColorRule rule;
    if (!item.contains("class_name") || !item["class_name"].is_string()) {
      throw Error(where + " needs a string class_name");
    }
    rule.class_name = item["class_name"].get<std::string>();
    auto channel = [&](const char* key, int lo, int hi, bool required, int fallback) {
      if (!item.contains(key)) {
        if (required) throw Error(where + " is missing '" + key + "'");
        return fallback;
      }
      const auto& v = item[key];
      if (!v.is_number_integer() || v.get<long>() < lo || v.get<long>() > hi) {
        throw Error(where + ": '" + key + "' must be an integer in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
      }
      return static_cast<int>(v.get<long>());
    };
    rule.r = static_cast<std::uint8_t>(channel("r", 0, 255, true, 0));
    rule.g = static_cast<std::uint8_t>(channel("g", 0, 255, true, 0));
    rule.b = static_cast<std::uint8_t>(channel("b", 0, 255, true, 0));
    rule.tolerance = channel("tolerance", 0, 255, false, 0);
    rules.push_back(std::move(rule));
  }
  return rules;
}

// ---------------------------------------------------------------------------

namespace {

// Next PPM header token, skipping whitespace and '#' comments.
std::string ppm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int ppm_int(std::istream& in, const char* what) {
  const std::string tok = ppm_token(in);
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (tok.empty() || *end != '\0' || v < 1 || v > 1 << 20) {
    throw Error(std::string("PPM header has an invalid ") + what);
  }
  return static_cast<int>(v);
}

}  // namespace

RgbImage read_ppm(std::istream& source) {
  if (ppm_token(source) != "P6") throw Error("not a binary PPM (P6) image");
  RgbImage img;
  img.width = ppm_int(source, "width");
  img.height = ppm_int(source, "height");
  if (ppm_int(source, "maxval") != 255) throw Error("only 8-bit PPM images (maxval 255) are read");
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  std::vector<char> raw(img.pixels.size() * 3);
  source.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (source.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw Error("PPM pixel data is truncated");
  }
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = {static_cast<std::uint8_t>(raw[3 * i]), static_cast<std::uint8_t>(raw[3 * i + 1]),
                     static_cast<std::uint8_t>(raw[3 * i + 2])};
  }
  img.geometry = GridGeometry{img.width, img.height, 0.0, 0.0, 1.0};
  return img;
}

void write_ppm(const RgbImage& image, std::ostream& sink) {
  sink << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  for (const auto& px : image.pixels) {
    sink.put(static_cast<char>(px.r)).put(static_cast<char>(px.g)).put(static_cast<char>(px.b));
  }
}

namespace {

std::filesystem::path sidecar_path(const std::filesystem::path& image) {
  return std::filesystem::path(image.string() + ".geo");
}

}  // namespace

RgbImage load_rgb_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image '" + path.string() + "'");
  RgbImage img = read_ppm(in);

  const auto geo = sidecar_path(path);
  if (std::filesystem::exists(geo)) {
    std::ifstream side(geo);
    std::string key;
    double value = 0.0;
    while (side >> key >> value) {
      for (auto& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (key == "xllcorner") {
        img.geometry.x_origin = value;
      } else if (key == "yllcorner") {
        img.geometry.y_origin = value;
      } else if (key == "cellsize") {
        img.geometry.cell_size = value;
      } else if (key == "ncols" || key == "nrows") {
        const int expect = key == "ncols" ? img.width : img.height;
        if (value != expect) throw Error("sidecar " + key + " does not match the image size");
      } else {
        throw Error("unknown sidecar key '" + key + "' in '" + geo.string() + "'");
      }
    }
    if (!side.eof()) throw Error("malformed sidecar '" + geo.string() + "'");
    img.geometry.validate();
  }
  return img;
}

void save_rgb_image(const RgbImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write image '" + path.string() + "'");
  write_ppm(image, out);
  std::ofstream side(sidecar_path(path));
  side << "ncols " << image.width << "\nnrows " << image.height << "\nxllcorner "
       << to_shortest_string(image.geometry.x_origin) << "\nyllcorner "
       << to_shortest_string(image.geometry.y_origin) << "\ncellsize "
       << to_shortest_string(image.geometry.cell_size) << '\n';
}

}  // namespace floodroute
