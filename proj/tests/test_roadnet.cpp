#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "floodroute/roadnet.hpp"
#include "support/oracles.hpp"

namespace fr = floodroute;
using nlohmann::json;
using oracle::Rng;

namespace {

fr::RoadNetwork load(const json& doc) {
  std::istringstream in(doc.dump());
  return fr::load_roadnet(in);
}

json two_nodes() {
  return json::parse(R"({
    "nodes": [{"id": "a", "lon": -79.0, "lat": 34.6}, {"id": "b", "lon": -79.0, "lat": 34.61}],
    "edges": [{"id": "ab", "from": "a", "to": "b", "polyline": [[-79.0, 34.6], [-79.0, 34.61]]}]
  })");
}

json random_network_json(Rng& rng) {
  const auto graph = oracle::random_graph(rng, {2, 8, 4, true, true, -79.0, 34.6, 0.02});
  json doc = {{"nodes", json::array()}, {"edges", json::array()}, {"pois", json::array()}};
  for (const auto& n : graph.nodes()) doc["nodes"].push_back({{"id", n.id}, {"lon", n.position.lon}, {"lat", n.position.lat}});
  for (const auto& e : graph.edges()) {
    json poly = json::array();
    for (const auto& p : e.polyline) poly.push_back({p.lon, p.lat});
    doc["edges"].push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}, {"polyline", poly}, {"strength", e.strength}});
  }
  const int pois = oracle::uniform_int(rng, 0, 3);
  const char* kinds[] = {"shelter", "lodging", "building"};
  for (int i = 0; i < pois; ++i) {
    doc["pois"].push_back({{"id", "p" + std::to_string(i)},
                           {"kind", kinds[oracle::uniform_int(rng, 0, 2)]},
                           {"lon", -79.0 + oracle::uniform(rng, 0, 0.02)},
                           {"lat", 34.6 + oracle::uniform(rng, 0, 0.02)},
                           {"name", "poi " + std::to_string(i)}});
  }
  return doc;
}

/// Every single-field corruption a loader must refuse.
std::vector<std::pair<std::string, json>> mutations(const json& doc) {
  std::vector<std::pair<std::string, json>> out;
  auto with = [&](const std::string& label, auto&& change) {
    json m = doc;
    change(m);
    out.emplace_back(label, std::move(m));
  };
  with("node without id", [](json& m) { m["nodes"][0].erase("id"); });
  with("node lon not a number", [](json& m) { m["nodes"][0]["lon"] = "west"; });
  with("duplicate node id", [](json& m) { m["nodes"].push_back(m["nodes"][0]); });
  with("duplicate edge id", [](json& m) { m["edges"].push_back(m["edges"][0]); });
  with("dangling from", [](json& m) { m["edges"][0]["from"] = "n99"; });
  with("dangling to", [](json& m) { m["edges"][0]["to"] = "n99"; });
  with("one-point polyline", [](json& m) { m["edges"][0]["polyline"] = json::array({m["edges"][0]["polyline"][0]}); });
  with("polyline start off node", [](json& m) { m["edges"][0]["polyline"][0][0] = m["edges"][0]["polyline"][0][0].get<double>() + 0.5; });
  with("polyline end off node", [](json& m) { m["edges"][0]["polyline"].back()[1] = 0.0; });
  with("zero strength", [](json& m) { m["edges"][0]["strength"] = 0; });
  with("negative strength", [](json& m) { m["edges"][0]["strength"] = -1.5; });
  with("edges not array", [](json& m) { m["edges"] = json::object(); });
  with("missing nodes", [](json& m) { m.erase("nodes"); });
  with("bad poi kind", [](json& m) {
    m["pois"].push_back({{"id", "px"}, {"kind", "castle"}, {"lon", 0}, {"lat", 0}, {"name", "x"}});
  });
  with("duplicate poi id", [](json& m) {
    json p = {{"id", "dup"}, {"kind", "shelter"}, {"lon", 0}, {"lat", 0}, {"name", "x"}};
    m["pois"].push_back(p);
    m["pois"].push_back(p);
  });
  return out;
}

}  // namespace

TEST(Load, TwoNodesOneEdge) {
  const auto net = load(two_nodes());
  ASSERT_EQ(net.graph.edges().size(), 1u);
  EXPECT_EQ(net.graph.nodes().size(), 2u);
  EXPECT_NEAR(net.graph.edges()[0].length_m, 1111.95, 0.5);
  EXPECT_EQ(net.graph.edges()[0].strength, 1.0);
  EXPECT_TRUE(net.pois.empty());
}

TEST(Load, MissingNodeIsNamed) {
  auto doc = two_nodes();
  doc["edges"][0]["to"] = "n9";
  try {
    load(doc);
    FAIL() << "expected an error";
  } catch (const fr::RoadnetError& e) {
    EXPECT_EQ(e.kind(), fr::RoadnetError::Kind::DanglingEndpoint);
    EXPECT_EQ(e.offending_id(), "n9");
    EXPECT_NE(std::string(e.what()).find("n9"), std::string::npos);
  }
}

TEST(Load, ZeroLengthGeometryRejected) {
  json doc = json::parse(R"({
    "nodes": [{"id": "a", "lon": 1.0, "lat": 1.0}],
    "edges": [{"id": "loop", "from": "a", "to": "a", "polyline": [[1.0, 1.0], [1.0, 1.0]]}]
  })");
  EXPECT_THROW(load(doc), fr::RoadnetError);
}

TEST(Load, GeneratedAcceptedMutationsRejected) {
  Rng rng(301);
  for (int trial = 0; trial < 60; ++trial) {
    const json doc = random_network_json(rng);
    ASSERT_NO_THROW(load(doc)) << doc.dump();
    for (const auto& [label, bad] : mutations(doc)) {
      EXPECT_THROW(load(bad), fr::RoadnetError) << label;
    }
  }
}

TEST(Load, SerializationRoundTrip) {
  Rng rng(302);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = load(random_network_json(rng));
    const std::string first = fr::roadnet_to_json(net);
    std::istringstream in(first);
    const auto back = fr::load_roadnet(in);
    EXPECT_EQ(back, net);
    EXPECT_EQ(fr::roadnet_to_json(back), first);
  }
}

TEST(Load, CodeBuiltGraphChecksLengthAndStrength) {
  std::vector<fr::RoadNode> nodes{{"a", {0, 0}}, {"b", {0, 1}}};
  fr::RoadEdge e{"ab", "a", "b", {{0, 0}, {0, 1}}, 0.0};
  EXPECT_THROW(fr::RoadGraph(nodes, {e}), fr::RoadnetError);
  e.length_m = 5;
  e.strength = 0;
  EXPECT_THROW(fr::RoadGraph(nodes, {e}), fr::RoadnetError);
}

// ---------------------------------------------------------------------------

TEST(Length, DegenerateEquatorAndAdditivity) {
  EXPECT_EQ(fr::haversine_m({-79.0, 34.6}, {-79.0, 34.6}), 0.0);
  const double degree = fr::kEarthRadiusM * 3.14159265358979323846 / 180.0;
  EXPECT_NEAR(degree, 111195.0, 1.0);
  EXPECT_NEAR(fr::edge_length({{0, 0}, {1, 0}}), degree, degree * 0.005);
  EXPECT_NEAR(fr::edge_length({{0, 0}, {1, 0}}), degree, 1e-6);

  Rng rng(303);
  for (int i = 0; i < 100; ++i) {
    const fr::LonLat a{oracle::uniform(rng, -180, 180), oracle::uniform(rng, -80, 80)};
    const fr::LonLat b{a.lon + oracle::uniform(rng, -1, 1), a.lat + oracle::uniform(rng, -1, 1)};
    const fr::LonLat c{b.lon + oracle::uniform(rng, -1, 1), b.lat + oracle::uniform(rng, -1, 1)};
    EXPECT_NEAR(fr::edge_length({a, b, c}), fr::edge_length({a, b}) + fr::edge_length({b, c}), 1e-6);
    EXPECT_NEAR(fr::haversine_m(a, b), oracle::great_circle_m(a.lon, a.lat, b.lon, b.lat), 1e-6);
  }
  EXPECT_THROW(fr::edge_length({{0, 0}}), fr::ContractError);
}

TEST(Cells, InsideOneCellAndOutside) {
  const fr::GridGeometry g{8, 8, 0.0, 0.0, 1.0};
  EXPECT_EQ(fr::edge_cells({{2.2, 3.3}, {2.8, 3.9}}, g), (std::set<fr::CellIndex>{{2, 3}}));
  EXPECT_TRUE(fr::edge_cells({{-3, -3}, {-1, 9}}, g).empty());
  EXPECT_TRUE(fr::edge_cells({{9, 9}, {12, 1}}, g).empty());
}

TEST(Cells, DiagonalThroughCornerTouchesAllFour) {
  const fr::GridGeometry g{4, 4, 0.0, 0.0, 1.0};
  const auto cells = fr::edge_cells({{0.5, 0.5}, {1.5, 1.5}}, g);
  EXPECT_EQ(cells, (std::set<fr::CellIndex>{{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
}

TEST(Cells, SupersetOfDenseSamplingAndTight) {
  Rng rng(304);
  for (int trial = 0; trial < 60; ++trial) {
    const fr::GridGeometry g{32, 32, oracle::uniform(rng, -80, -78), oracle::uniform(rng, 34, 35), 0.001};
    fr::Polyline line;
    const int points = oracle::uniform_int(rng, 2, 4);
    for (int i = 0; i < points; ++i) {
      // Some points land outside the extent.
      line.push_back({g.x_origin + oracle::uniform(rng, -0.004, 0.036), g.y_origin + oracle::uniform(rng, -0.004, 0.036)});
    }
    if (oracle::coin(rng, 0.2)) line[1].lon = line[0].lon;  // vertical segment
    const auto got = fr::edge_cells(line, g);
    for (const auto& cell : oracle::dense_samples(line, g)) {
      EXPECT_TRUE(got.count(cell)) << "missed cell " << cell.col << "," << cell.row;
    }
    for (const auto& cell : got) {
      EXPECT_TRUE(oracle::polyline_hits_cell(line, g, cell.col, cell.row, g.cell_size))
          << "far cell " << cell.col << "," << cell.row;
    }
    // Exact supercover: every cell the clipping test hits is reported.
    for (long r = 0; r < g.rows; ++r) {
      for (long c = 0; c < g.cols; ++c) {
        if (oracle::polyline_hits_cell(line, g, c, r)) EXPECT_TRUE(got.count({c, r}));
      }
    }
  }
}

// ---------------------------------------------------------------------------

TEST(Overlay, DryFloodedAndComposedOracle) {
  Rng rng(305);
  const fr::GridGeometry g{16, 16, 0.0, 0.0, 0.001};
  for (int trial = 0; trial < 40; ++trial) {
    const auto graph = oracle::random_graph(rng, {2, 10, 5, true, false, 0.0, 0.0, 0.016});
    EXPECT_TRUE(fr::apply_flood_overlay(graph, fr::FloodMask(g)).blocked_ids().empty());
    EXPECT_EQ(fr::apply_flood_overlay(graph, fr::FloodMask(g, true)).blocked_ids().size(), graph.edges().size());

    const auto mask = oracle::random_mask(rng, g, 0.05);
    const auto overlay = fr::apply_flood_overlay(graph, mask);
    EXPECT_EQ(overlay.source_mask_geometry, g);
    for (const auto& e : graph.edges()) {
      bool hit = false;
      for (long r = 0; r < g.rows && !hit; ++r) {
        for (long c = 0; c < g.cols && !hit; ++c) {
          hit = mask.flooded(r, c) && oracle::polyline_hits_cell(e.polyline, g, c, r);
        }
      }
      EXPECT_EQ(overlay.is_blocked(e.id), hit) << e.id;
    }
  }
}

TEST(Overlay, ReportJson) {
  const auto net = load(two_nodes());
  fr::HazardOverlay o = fr::passable_overlay(net.graph);
  EXPECT_EQ(fr::overlay_report_json(o), "{\"blocked\":{\"ab\":false},\"summary\":{\"blocked\":0,\"passable\":1,\"total\":1}}\n");
  EXPECT_THROW(o.is_blocked("zz"), fr::ContractError);
}

// ---------------------------------------------------------------------------

TEST(Snap, CoincidentBeyondRadiusAndScan) {
  const auto net = load(two_nodes());
  EXPECT_EQ(fr::nearest_node(net.graph, -79.0, 34.6), "a");
  EXPECT_EQ(fr::nearest_node(net.graph, -78.0, 34.6), std::nullopt);
  EXPECT_THROW(fr::nearest_node(net.graph, -79.0, 34.6, 0.0), fr::ContractError);

  // Two nodes at one spot: the smaller id wins.
  fr::RoadGraph twins({{"z", {1, 1}}, {"y", {1, 1}}, {"x", {1, 1.01}}},
                      {{"zx", "z", "x", {{1, 1}, {1, 1.01}}, 10.0}, {"yx", "y", "x", {{1, 1}, {1, 1.01}}, 10.0}});
  EXPECT_EQ(fr::nearest_node(twins, 1.0, 1.0), "y");

  Rng rng(306);
  for (int trial = 0; trial < 200; ++trial) {
    const auto graph = oracle::random_graph(rng, {2, 12, 3, true, false, -79.0, 34.6, 0.02});
    const double lon = -79.0 + oracle::uniform(rng, -0.005, 0.025);
    const double lat = 34.6 + oracle::uniform(rng, -0.005, 0.025);
    const double radius = oracle::uniform(rng, 50, 1500);
    EXPECT_EQ(fr::nearest_node(graph, lon, lat, radius), oracle::nearest_by_scan(graph, lon, lat, radius));
  }
}

TEST(Validate, ComponentsIsolatedZeroLength) {
  fr::RoadGraph one({{"a", {0, 0}}, {"b", {0, 1}}}, {{"ab", "a", "b", {{0, 0}, {0, 1}}, 5.0}});
  auto rep = fr::validate_graph(one);
  EXPECT_EQ(rep.component_count(), 1u);
  EXPECT_TRUE(rep.isolated_nodes.empty());

  fr::RoadGraph two({{"a", {0, 0}}, {"b", {0, 1}}, {"c", {1, 0}}, {"d", {1, 1}}, {"e", {2, 2}}},
                    {{"ab", "a", "b", {{0, 0}, {0, 1}}, 5.0}, {"cd", "c", "d", {{1, 0}, {1, 1}}, 5.0},
                     {"ee", "e", "e", {{2, 2}, {2, 2}}, 1.0}});
  rep = fr::validate_graph(two);
  EXPECT_EQ(rep.component_count(), 3u);
  EXPECT_EQ(rep.components[1], (std::vector<std::string>{"c", "d"}));
  EXPECT_EQ(rep.zero_length_edges, (std::vector<std::string>{"ee"}));

  fr::RoadGraph lonely({{"a", {0, 0}}, {"b", {0, 1}}, {"q", {3, 3}}}, {{"ab", "a", "b", {{0, 0}, {0, 1}}, 5.0}});
  EXPECT_EQ(fr::validate_graph(lonely).isolated_nodes, (std::vector<std::string>{"q"}));

  Rng rng(307);
  for (int trial = 0; trial < 50; ++trial) {
    // Disjoint union of random connected pieces plus stray nodes.
    std::vector<fr::RoadNode> nodes;
    std::vector<fr::RoadEdge> edges;
    const int pieces = oracle::uniform_int(rng, 1, 4);
    for (int p = 0; p < pieces; ++p) {
      const auto g = oracle::random_graph(rng, {1, 5, 2});
      for (auto n : g.nodes()) {
        n.id = "p" + std::to_string(p) + n.id;
        nodes.push_back(n);
      }
      for (auto e : g.edges()) {
        e.id = "p" + std::to_string(p) + e.id;
        e.from = "p" + std::to_string(p) + e.from;
        e.to = "p" + std::to_string(p) + e.to;
        edges.push_back(e);
      }
    }
    const fr::RoadGraph graph(nodes, edges);
    EXPECT_EQ(fr::validate_graph(graph).component_count(), oracle::union_find_components(graph));
  }
}
