#include "floodroute/roadnet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace floodroute {

using nlohmann::json;
using Kind = RoadnetError::Kind;

RoadGraph::RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::sort(nodes_.begin(), nodes_.end(), by_id);
  std::sort(edges_.begin(), edges_.end(), by_id);

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (!node_lookup_.emplace(n.id, i).second) {
      throw RoadnetError(Kind::DuplicateId, n.id, "duplicate node id '" + n.id + "'");
    }
    if (!std::isfinite(n.position.lon) || !std::isfinite(n.position.lat)) {
      throw RoadnetError(Kind::Schema, n.id, "node '" + n.id + "' has non-finite coordinates");
    }
  }

  incident_.resize(nodes_.size());
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    if (!edge_lookup_.emplace(e.id, i).second) {
      throw RoadnetError(Kind::DuplicateId, e.id, "duplicate edge id '" + e.id + "'");
    }
    auto from = node_lookup_.find(e.from);
    if (from == node_lookup_.end()) {
      throw RoadnetError(Kind::DanglingEndpoint, e.from,
                         "edge '" + e.id + "' references missing node '" + e.from + "'");
    }
    auto to = node_lookup_.find(e.to);
    if (to == node_lookup_.end()) {
      throw RoadnetError(Kind::DanglingEndpoint, e.to,
                         "edge '" + e.id + "' references missing node '" + e.to + "'");
    }
    if (e.polyline.size() < 2) {
      throw RoadnetError(Kind::ShortPolyline, e.id,
                         "edge '" + e.id + "' polyline needs at least two points");
    }
    if (!(e.polyline.front() == nodes_[from->second].position) ||
        !(e.polyline.back() == nodes_[to->second].position)) {
      throw RoadnetError(Kind::EndpointMismatch, e.id,
                         "edge '" + e.id + "' polyline does not start and end at its nodes");
    }
    if (!(e.length_m > 0.0) || !std::isfinite(e.length_m)) {
      throw RoadnetError(Kind::NonPositiveLength, e.id,
                         "edge '" + e.id + "' has non-positive length");
    }
    if (!(e.strength > 0.0) || !std::isfinite(e.strength)) {
      throw RoadnetError(Kind::NonPositiveStrength, e.id,
                         "edge '" + e.id + "' has non-positive strength");
    }
    endpoints_.emplace_back(from->second, to->second);
    incident_[from->second].push_back(i);
    if (to->second != from->second) incident_[to->second].push_back(i);
  }
}

std::optional<std::size_t> RoadGraph::node_index(const std::string& id) const {
  auto it = node_lookup_.find(id);
  if (it == node_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> RoadGraph::edge_index(const std::string& id) const {
  auto it = edge_lookup_.find(id);
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

const RoadNode& RoadGraph::node(const std::string& id) const {
  auto i = node_index(id);
  if (!i) throw ContractError("unknown node id '" + id + "'");
  return nodes_[*i];
}

const RoadEdge& RoadGraph::edge(const std::string& id) const {
  auto i = edge_index(id);
  if (!i) throw ContractError("unknown edge id '" + id + "'");
  return edges_[*i];
}

std::string to_string(PoiKind kind) {
  switch (kind) {
    case PoiKind::Shelter:
      return "shelter";
    case PoiKind::Lodging:
      return "lodging";
    case PoiKind::Building:
      return "building";
  }
  return "building";
}

std::optional<PoiKind> parse_poi_kind(const std::string& text) {
  if (text == "shelter") return PoiKind::Shelter;
  if (text == "lodging") return PoiKind::Lodging;
  if (text == "building") return PoiKind::Building;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON carrier

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw RoadnetError(Kind::Schema, where, where + " is missing '" + key + "'");
  }
  return obj.at(key);
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_string()) throw RoadnetError(Kind::Schema, where, where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

double number_field(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number()) throw RoadnetError(Kind::Schema, where, where + ": '" + key + "' must be a number");
  return v.get<double>();
}

json point_json(const LonLat& p) { return json::array({p.lon, p.lat}); }

}  // namespace

RoadNetwork load_roadnet(std::istream& source) {
  json doc;
  try {
    doc = json::parse(source);
  } catch (const json::parse_error& e) {
    throw RoadnetError(Kind::Schema, "", std::string("road network is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw RoadnetError(Kind::Schema, "", "road network must be a JSON object");
  const auto& jnodes = field(doc, "nodes", "road network");
  const auto& jedges = field(doc, "edges", "road network");
  if (!jnodes.is_array() || !jedges.is_array()) {
    throw RoadnetError(Kind::Schema, "", "'nodes' and 'edges' must be arrays");
  }

  std::vector<RoadNode> nodes;
  for (const auto& jn : jnodes) {
    const std::string id = string_field(jn, "id", "node");
    nodes.push_back({id, {number_field(jn, "lon", "node " + id), number_field(jn, "lat", "node " + id)}});
  }

  std::vector<RoadEdge> edges;
  for (const auto& je : jedges) {
    RoadEdge e;
    e.id = string_field(je, "id", "edge");
    const std::string where = "edge " + e.id;
    e.from = string_field(je, "from", where);
    e.to = string_field(je, "to", where);
    const auto& jpoly = field(je, "polyline", where);
    if (!jpoly.is_array()) throw RoadnetError(Kind::Schema, e.id, where + ": polyline must be an array");
    for (const auto& pt : jpoly) {
      if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
        throw RoadnetError(Kind::Schema, e.id, where + ": polyline points must be [lon, lat]");
      }
      e.polyline.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    if (e.polyline.size() < 2) {
      throw RoadnetError(Kind::ShortPolyline, e.id, where + ": polyline needs at least two points");
    }
    e.length_m = edge_length(e.polyline);
    if (je.contains("strength")) e.strength = number_field(je, "strength", where);
    if (je.contains("name") && !je.at("name").is_null()) e.name = string_field(je, "name", where);
    edges.push_back(std::move(e));
  }

  RoadNetwork out{RoadGraph(std::move(nodes), std::move(edges)), {}};

  if (doc.contains("pois")) {
    const auto& jpois = doc.at("pois");
    if (!jpois.is_array()) throw RoadnetError(Kind::Schema, "", "'pois' must be an array");
    std::set<std::string> seen;
    for (const auto& jp : jpois) {
      Poi p;
      p.id = string_field(jp, "id", "poi");
      const std::string where = "poi " + p.id;
      if (!seen.insert(p.id).second) {
        throw RoadnetError(Kind::DuplicateId, p.id, "duplicate poi id '" + p.id + "'");
      }
      const std::string kind = string_field(jp, "kind", where);
      auto parsed = parse_poi_kind(kind);
      if (!parsed) {
        throw RoadnetError(Kind::BadPoiKind, p.id, where + ": unknown kind '" + kind + "'");
      }
      p.kind = *parsed;
      p.position = {number_field(jp, "lon", where), number_field(jp, "lat", where)};
      p.name = string_field(jp, "name", where);
      out.pois.push_back(std::move(p));
    }
    std::sort(out.pois.begin(), out.pois.end(), [](const Poi& a, const Poi& b) { return a.id < b.id; });
  }
  return out;
}

RoadNetwork load_roadnet(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open road network '" + path.string() + "'");
  return load_roadnet(in);
}

std::string roadnet_to_json(const RoadNetwork& network) {
  json doc = json::object();
  doc["nodes"] = json::array();
  for (const auto& n : network.graph.nodes()) {
    doc["nodes"].push_back({{"id", n.id}, {"lon", n.position.lon}, {"lat", n.position.lat}});
  }
  doc["edges"] = json::array();
  for (const auto& e : network.graph.edges()) {
    json je = {{"id", e.id}, {"from", e.from}, {"to", e.to}, {"strength", e.strength}};
    je["polyline"] = json::array();
    for (const auto& p : e.polyline) je["polyline"].push_back(point_json(p));
    if (e.name) je["name"] = *e.name;
    doc["edges"].push_back(std::move(je));
  }
  doc["pois"] = json::array();
  for (const auto& p : network.pois) {
    doc["pois"].push_back({{"id", p.id},
                           {"kind", to_string(p.kind)},
                           {"lon", p.position.lon},
                           {"lat", p.position.lat},
                           {"name", p.name}});
  }
  return doc.dump() + "\n";
}

// ---------------------------------------------------------------------------
// Geometry

double haversine_m(const LonLat& a, const LonLat& b) {
  constexpr double kRad = std::numbers::pi / 180.0;
  const double phi1 = a.lat * kRad;
  const double phi2 = b.lat * kRad;
  const double dphi = (b.lat - a.lat) * kRad;
  const double dlambda = (b.lon - a.lon) * kRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = std::min(1.0, s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2);
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

double edge_length(const Polyline& polyline) {
  if (polyline.size() < 2) throw ContractError("a polyline needs at least two points");
  double total = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i) total += haversine_m(polyline[i - 1], polyline[i]);
  return total;
}

namespace {

// Slack in cell units; keeps the cover conservative against rounding.
constexpr double kCoverSlack = 1e-9;

// Cells k in [0, n) with [k, k+1] intersecting [lo, hi].
std::pair<Eigen::Index, Eigen::Index> touched_range(double lo, double hi, Eigen::Index n) {
  const double first = std::clamp(std::ceil(lo) - 1.0, -1.0, static_cast<double>(n));
  const double last = std::clamp(std::floor(hi), -1.0, static_cast<double>(n));
  return {std::max<Eigen::Index>(0, static_cast<Eigen::Index>(first)),
          std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(last))};
}

void cover_segment(const LonLat& a, const LonLat& b, const GridGeometry& g, std::set<CellIndex>& out) {
  const double u0 = (a.lon - g.x_origin) / g.cell_size;
  const double v0 = (a.lat - g.y_origin) / g.cell_size;
  const double u1 = (b.lon - g.x_origin) / g.cell_size;
  const double v1 = (b.lat - g.y_origin) / g.cell_size;
  const double du = u1 - u0;
  const double dv = v1 - v0;

  auto [c_lo, c_hi] =
      touched_range(std::min(u0, u1) - kCoverSlack, std::max(u0, u1) + kCoverSlack, g.cols);
  for (Eigen::Index c = c_lo; c <= c_hi; ++c) {
    double t_lo = 0.0;
    double t_hi = 1.0;
    if (du != 0.0) {
      double ta = (static_cast<double>(c) - kCoverSlack - u0) / du;
      double tb = (static_cast<double>(c + 1) + kCoverSlack - u0) / du;
      if (ta > tb) std::swap(ta, tb);
      t_lo = std::max(t_lo, ta);
      t_hi = std::min(t_hi, tb);
      if (t_lo > t_hi) continue;
    }
    const double va = v0 + t_lo * dv;
    const double vb = v0 + t_hi * dv;
    auto [r_lo, r_hi] =
        touched_range(std::min(va, vb) - kCoverSlack, std::max(va, vb) + kCoverSlack, g.rows);
    for (Eigen::Index r = r_lo; r <= r_hi; ++r) out.insert(CellIndex{c, r});
  }
}

}  // namespace

std::set<CellIndex> edge_cells(const Polyline& polyline, const GridGeometry& geometry) {
  std::set<CellIndex> cells;
  if (polyline.size() == 1) cover_segment(polyline[0], polyline[0], geometry, cells);
  for (std::size_t i = 1; i < polyline.size(); ++i) {
    cover_segment(polyline[i - 1], polyline[i], geometry, cells);
  }
  return cells;
}

// ---------------------------------------------------------------------------

bool HazardOverlay::is_blocked(const std::string& edge_id) const {
  auto it = std::lower_bound(edge_ids.begin(), edge_ids.end(), edge_id);
  if (it == edge_ids.end() || *it != edge_id) {
    throw ContractError("overlay has no entry for edge '" + edge_id + "'");
  }
  return blocked[static_cast<std::size_t>(it - edge_ids.begin())];
}

std::set<std::string> HazardOverlay::blocked_ids() const {
  std::set<std::string> out;
  for (std::size_t i = 0; i < edge_ids.size(); ++i) {
    if (blocked[i]) out.insert(edge_ids[i]);
  }
  return out;
}

HazardOverlay passable_overlay(const RoadGraph& graph) {
  HazardOverlay overlay;
  for (const auto& e : graph.edges()) overlay.edge_ids.push_back(e.id);
  overlay.blocked.assign(graph.edges().size(), false);
  return overlay;
}

HazardOverlay apply_flood_overlay(const RoadGraph& graph, const FloodMask& mask) {
  HazardOverlay overlay = passable_overlay(graph);
  overlay.source_mask_geometry = mask.geometry;
  for (std::size_t i = 0; i < graph.edges().size(); ++i) {
    const auto cells = edge_cells(graph.edges()[i].polyline, mask.geometry);
    overlay.blocked[i] =
        std::any_of(cells.begin(), cells.end(), [&](const CellIndex& c) { return mask(c); });
  }
  return overlay;
}

std::string overlay_report_json(const HazardOverlay& overlay) {
  json blocked = json::object();
  std::size_t n_blocked = 0;
  for (std::size_t i = 0; i < overlay.edge_ids.size(); ++i) {
    blocked[overlay.edge_ids[i]] = static_cast<bool>(overlay.blocked[i]);
    n_blocked += overlay.blocked[i] ? 1 : 0;
  }
  json doc = {{"blocked", std::move(blocked)},
              {"summary",
               {{"blocked", n_blocked},
                {"passable", overlay.edge_ids.size() - n_blocked},
                {"total", overlay.edge_ids.size()}}}};
  return doc.dump() + "\n";
}

std::optional<std::string> nearest_node(const RoadGraph& graph, double lon, double lat,
                                        double max_radius_m) {
  if (!(max_radius_m > 0.0)) throw ContractError("snap radius must be positive");
  const LonLat p{lon, lat};
  const RoadNode* best = nullptr;
  double best_d = 0.0;
  for (const auto& n : graph.nodes()) {
    const double d = haversine_m(p, n.position);
    if (d <= max_radius_m && (!best || d < best_d)) {
      best = &n;
      best_d = d;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

GraphReport validate_graph(const RoadGraph& graph) {
  GraphReport report;
  const auto& nodes = graph.nodes();
  std::vector<bool> seen(nodes.size(), false);
  for (std::size_t start = 0; start < nodes.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::string> component;
    std::deque<std::size_t> queue{start};
    seen[start] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      component.push_back(nodes[u].id);
      for (std::size_t e : graph.incident(u)) {
        const std::size_t v = graph.from_index(e) == u ? graph.to_index(e) : graph.from_index(e);
        if (!seen[v]) {
          seen[v] = true;
          queue.push_back(v);
        }
      }
    }
    std::sort(component.begin(), component.end());
    report.components.push_back(std::move(component));
    if (graph.incident(start).empty()) report.isolated_nodes.push_back(nodes[start].id);
  }
  for (const auto& e : graph.edges()) {
    if (edge_length(e.polyline) == 0.0) report.zero_length_edges.push_back(e.id);
  }
  return report;
}

}  // namespace floodroute
