#include <gtest/gtest.h>

#include "floodroute/inundation.hpp"
#include "support/oracles.hpp"

namespace fr = floodroute;
using oracle::Rng;

namespace {

fr::RasterGrid uniform_dem(long cols, long rows, double v) {
  return fr::RasterGrid({cols, rows, 0.0, 0.0, 1.0}, v, fr::kDefaultNodata);
}

fr::SeedSet random_seeds(Rng& rng, const fr::GridGeometry& g) {
  fr::SeedSet seeds;
  const int n = oracle::uniform_int(rng, 1, 6);
  for (int i = 0; i < n; ++i) {
    seeds.insert({oracle::uniform_int(rng, 0, static_cast<int>(g.cols) - 1),
                  oracle::uniform_int(rng, 0, static_cast<int>(g.rows) - 1)});
  }
  return seeds;
}

}  // namespace

TEST(Threshold, LevelAboveOrBelowEverything) {
  EXPECT_EQ(fr::threshold_inundation(uniform_dem(4, 3, 10.0), 13.0).count(), 12);
  EXPECT_EQ(fr::threshold_inundation(uniform_dem(4, 3, 10.0), 9.0).count(), 0);
  EXPECT_EQ(fr::threshold_inundation(uniform_dem(4, 3, 10.0), 10.0).count(), 0);
}

TEST(Threshold, MatchesPerCellComparison) {
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dem = oracle::random_dem(rng);
    const double level = oracle::uniform(rng, -1, 11);
    const auto mask = fr::threshold_inundation(dem, level);
    for (long r = 0; r < 16; ++r) {
      for (long c = 0; c < 16; ++c) {
        const double v = dem.values(r, c);
        EXPECT_EQ(mask.flooded(r, c), v != dem.nodata && v < level);
      }
    }
  }
}

TEST(Connected, SingleCell) {
  EXPECT_EQ(fr::connected_inundation(uniform_dem(1, 1, 1.0), 2.0, {{0, 0}}).count(), 1);
}

TEST(Connected, RingedBasinStaysDry) {
  // 7x7 at 1 m; a ring at 5 m around the centre 3x3 block.
  auto dem = uniform_dem(7, 7, 1.0);
  for (long i = 1; i <= 5; ++i) {
    dem.values(1, i) = dem.values(5, i) = dem.values(i, 1) = dem.values(i, 5) = 5.0;
  }
  const auto mask = fr::connected_inundation(dem, 2.0, {{0, 0}});
  const auto bathtub = fr::threshold_inundation(dem, 2.0);
  for (long r = 2; r <= 4; ++r) {
    for (long c = 2; c <= 4; ++c) {
      EXPECT_FALSE(mask.flooded(r, c));
      EXPECT_TRUE(bathtub.flooded(r, c));
    }
  }
  EXPECT_EQ(mask.count(), 49 - 16 - 9);
}

TEST(Connected, SeedAboveLevelFloodsNothing) {
  auto dem = uniform_dem(3, 1, 1.0);
  dem.values(0, 0) = 9.0;
  EXPECT_EQ(fr::connected_inundation(dem, 2.0, {{0, 0}}).count(), 0);
}

TEST(Connected, RejectsBadSeeds) {
  const auto dem = uniform_dem(3, 3, 1.0);
  EXPECT_THROW(fr::connected_inundation(dem, 2.0, {}), fr::ContractError);
  EXPECT_THROW(fr::connected_inundation(dem, 2.0, {{3, 0}}), fr::ContractError);
}

TEST(Connected, MatchesBfsOracle) {
  Rng rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dem = oracle::random_dem(rng);
    const double level = oracle::uniform(rng, 0, 10);
    const auto seeds = random_seeds(rng, dem.geometry);
    EXPECT_EQ(fr::connected_inundation(dem, level, seeds), oracle::bfs_flood(dem, level, seeds));
  }
}

TEST(Connected, IsSubsetOfThreshold) {
  Rng rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dem = oracle::random_dem(rng);
    const double level = oracle::uniform(rng, 0, 10);
    EXPECT_TRUE(fr::is_subset(fr::connected_inundation(dem, level, random_seeds(rng, dem.geometry)),
                              fr::threshold_inundation(dem, level)));
  }
}

TEST(Connected, MonotoneInLevel) {
  Rng rng(104);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dem = oracle::random_dem(rng);
    const auto seeds = random_seeds(rng, dem.geometry);
    double lo = oracle::uniform(rng, 0, 10);
    double hi = oracle::uniform(rng, 0, 10);
    if (lo > hi) std::swap(lo, hi);
    EXPECT_TRUE(fr::is_subset(fr::connected_inundation(dem, lo, seeds), fr::connected_inundation(dem, hi, seeds)));
    EXPECT_TRUE(fr::is_subset(fr::threshold_inundation(dem, lo), fr::threshold_inundation(dem, hi)));
  }
}

TEST(Seeds, WholeGridAndSingleLowest) {
  auto dem = uniform_dem(4, 4, 2.0);
  dem.values(1, 1) = dem.nodata;
  EXPECT_EQ(fr::default_seeds(dem, 1.0).size(), 15u);

  fr::RasterGrid ramp({5, 1, 0.0, 0.0, 1.0}, 0.0, fr::kDefaultNodata);
  ramp.values << 3, 1, 4, 5, 9;
  EXPECT_EQ(fr::default_seeds(ramp, 0.2), (fr::SeedSet{{1, 0}}));
  EXPECT_THROW(fr::default_seeds(ramp, 0.0), fr::ContractError);
  EXPECT_THROW(fr::default_seeds(ramp, 1.5), fr::ContractError);
}

TEST(Seeds, MatchesFullSort) {
  Rng rng(105);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dem = oracle::random_dem(rng, 16, 16, 0.1);
    const double fraction = oracle::uniform(rng, 0.001, 1.0);
    std::vector<std::tuple<double, long, long>> cells;
    for (long r = 0; r < 16; ++r) {
      for (long c = 0; c < 16; ++c) {
        if (dem.values(r, c) != dem.nodata) cells.emplace_back(dem.values(r, c), r, c);
      }
    }
    std::sort(cells.begin(), cells.end());
    const double exact = fraction * static_cast<double>(cells.size());
    std::size_t k = static_cast<std::size_t>(std::ceil(exact));
    if (std::abs(exact - std::round(exact)) < 1e-9) k = static_cast<std::size_t>(std::round(exact));
    k = std::clamp<std::size_t>(k, 1, cells.size());
    fr::SeedSet want;
    for (std::size_t i = 0; i < k; ++i) want.insert({std::get<2>(cells[i]), std::get<1>(cells[i])});
    EXPECT_EQ(fr::default_seeds(dem, fraction), want);
  }
}

TEST(Fuse, IdentityIdempotenceAndOr) {
  Rng rng(106);
  const fr::GridGeometry g{9, 7, 0.0, 0.0, 1.0};
  const auto b = oracle::random_mask(rng, g);
  EXPECT_EQ(fr::fuse_masks(fr::FloodMask(g), b), b);
  EXPECT_EQ(fr::fuse_masks(b, b), b);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = oracle::random_mask(rng, g);
    const auto y = oracle::random_mask(rng, g);
    const auto u = fr::fuse_masks(x, y);
    for (long r = 0; r < g.rows; ++r) {
      for (long c = 0; c < g.cols; ++c) EXPECT_EQ(u.flooded(r, c), x.flooded(r, c) || y.flooded(r, c));
    }
  }
  fr::GridGeometry other = g;
  other.cell_size = 2.0;
  EXPECT_THROW(fr::fuse_masks(b, fr::FloodMask(other)), fr::GeometryMismatch);
}

TEST(Fraction, PopcountOverSize) {
  Rng rng(107);
  const fr::GridGeometry g{13, 5, 0.0, 0.0, 1.0};
  EXPECT_EQ(fr::flooded_fraction(fr::FloodMask(g)), 0.0);
  EXPECT_EQ(fr::flooded_fraction(fr::FloodMask(g, true)), 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = oracle::random_mask(rng, g);
    int set = 0;
    for (long r = 0; r < g.rows; ++r) {
      for (long c = 0; c < g.cols; ++c) set += m.flooded(r, c) ? 1 : 0;
    }
    EXPECT_DOUBLE_EQ(fr::flooded_fraction(m), set / 65.0);
  }
}

TEST(MaskGrid, RoundTrip) {
  Rng rng(108);
  const fr::GridGeometry g{6, 4, 1.0, 2.0, 0.5};
  const auto m = oracle::random_mask(rng, g);
  EXPECT_EQ(fr::grid_to_mask(fr::mask_to_grid(m)), m);
}

TEST(Levels, FeetToMeters) {
  EXPECT_DOUBLE_EQ(fr::feet_to_meters(13.0), 3.9624);
  EXPECT_DOUBLE_EQ(fr::feet_to_meters(20.0), 6.096);
}
