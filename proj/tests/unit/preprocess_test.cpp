/*
 * Copyright 2026 The coastsurr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/io.hpp"
#include "coastsurr/core/random.hpp"
#include "coastsurr/preprocess/classify.hpp"
#include "coastsurr/preprocess/geo.hpp"
#include "coastsurr/preprocess/grid_mapping.hpp"
#include "coastsurr/preprocess/sample_builder.hpp"
#include "oracles.hpp"

namespace coastsurr {
namespace {

GridSpec square(int n, double lo = 0.0, double hi = 10.0) { return {n, lo, hi, lo, hi}; }

TEST(GridSpec, BoundsAreExtrema) {
  std::vector<InundationPoint> pts = {{0, 3, 0}, {10, 0, 0}, {4, 10, 1}};
  const auto s = build_grid_spec(std::span<const InundationPoint>(pts), 11);
  EXPECT_EQ(s, square(11));
  std::vector<InundationPoint> one = {{1, 1, 0}};
  EXPECT_THROW(build_grid_spec(std::span<const InundationPoint>(one), 11), ConfigError);
  EXPECT_THROW(build_grid_spec(std::span<const InundationPoint>(), 11), ConfigError);
}

TEST(MapToCell, LinearMapAndClamp) {
  const auto s = square(11);
  EXPECT_EQ(map_to_cell(5.0, 5.0, s), (Cell{5, 5}));
  EXPECT_EQ(map_to_cell(10.0, 0.0, s), (Cell{10, 0}));
  EXPECT_EQ(map_to_cell(-3.0, 13.0, s), (Cell{0, 10}));
  EXPECT_EQ(map_to_cell(std::nan(""), 1.0, s).i, 0);
}

TEST(ResolveConflicts, SecondPointMovesToNeighbor) {
  const auto s = square(8);
  std::vector<CellAssignment> raw = {{0, {3, 3}, false}, {1, {3, 3}, false}};
  const auto out = resolve_conflicts(raw, s);
  EXPECT_EQ(out[0].cell, (Cell{3, 3}));
  EXPECT_FALSE(out[0].reassigned);
  EXPECT_TRUE(out[1].reassigned);
  EXPECT_EQ(std::abs(out[1].cell.i - 3) + std::abs(out[1].cell.j - 3), 1);
  EXPECT_EQ(out[1].cell, (Cell{2, 3}));  // tie break: smaller i' first
}

TEST(ResolveConflicts, IdentityWithoutCollisions) {
  const auto s = square(4);
  std::vector<CellAssignment> raw = {{0, {0, 0}, false}, {1, {1, 2}, false}, {2, {3, 3}, false}};
  const auto out = resolve_conflicts(raw, s);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    EXPECT_EQ(out[k].cell, raw[k].cell);
    EXPECT_FALSE(out[k].reassigned);
  }
}

TEST(ResolveConflicts, CapacityError) {
  std::vector<CellAssignment> raw(5);
  EXPECT_THROW(resolve_conflicts(raw, square(2)), CapacityError);
  raw.resize(4);
  EXPECT_NO_THROW(resolve_conflicts(raw, square(2)));
}

// 500 random dense tables; the oracle replays the documented order and checks
// injectivity plus minimal Manhattan distance by enumerating every empty cell.
TEST(ResolveConflicts, InjectiveAndMinimalOnRandomDenseTables) {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(31));
    const auto cells = static_cast<std::size_t>(n) * n;
    const std::size_t count = 1 + rng.below(cells);
    const int ci = static_cast<int>(rng.below(n));
    const int cj = static_cast<int>(rng.below(n));
    const int spread = 1 + static_cast<int>(rng.below(n));
    std::vector<CellAssignment> raw(count);
    for (std::size_t k = 0; k < count; ++k) {
      raw[k].point_index = k;
      raw[k].cell.i = std::clamp(ci + static_cast<int>(rng.below(2 * spread + 1)) - spread, 0, n - 1);
      raw[k].cell.j = std::clamp(cj + static_cast<int>(rng.below(2 * spread + 1)) - spread, 0, n - 1);
    }
    const auto out = resolve_conflicts(raw, square(n));
    ASSERT_EQ(out.size(), count);
    EXPECT_TRUE(oracle::check_conflict_resolution(raw, out, n)) << "trial " << trial << " n=" << n;
  }
}

TEST(Haversine, MatchesChordOracle) {
  const double one_deg = geo::haversine_km({0, 0}, {0, 1}, 6367.0);
  EXPECT_NEAR(one_deg, static_cast<double>(oracle::sphere_distance_km(0, 0, 0, 1, 6367.0L)), 1e-6);
  EXPECT_NEAR(one_deg, 6367.0 * 3.14159265358979323846 / 180.0, 1e-9);
  EXPECT_EQ(geo::haversine_km({12.5, -70.1}, {12.5, -70.1}), 0.0);
  Rng rng(5);
  for (int k = 0; k < 2000; ++k) {
    const LatLon a{rng.uniform(-89, 89), rng.uniform(-180, 180)};
    const LatLon b{rng.uniform(-89, 89), rng.uniform(-180, 180)};
    const double d = geo::haversine_km(a, b);
    EXPECT_NEAR(d, static_cast<double>(oracle::sphere_distance_km(a.lat, a.lon, b.lat, b.lon, 6367.0L)),
                1e-6);
    EXPECT_EQ(d, geo::haversine_km(b, a));
    const LatLon c{rng.uniform(-89, 89), rng.uniform(-180, 180)};
    EXPECT_LE(d, geo::haversine_km(a, c) + geo::haversine_km(c, b) + 1e-9);
  }
}

TEST(Utm, RoundTripAgainstIndependentForward) {
  Rng rng(10);
  double worst = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double lat = rng.uniform(0.0, 80.0);
    const double lon = rng.uniform(-126.0, -120.0);
    const auto fwd = oracle::kruger_forward(lat, lon, -123.0);
    const LatLon back = geo::utm_to_latlon(fwd.first, fwd.second, 10, true);
    worst = std::max({worst, std::abs(back.lat - lat), std::abs(back.lon - lon)});
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Utm, CentralMeridianAndZones) {
  const auto c = geo::latlon_to_utm({0.0, -123.0}, 10, true);
  EXPECT_NEAR(c.easting, 500000.0, 1e-6);
  EXPECT_NEAR(c.northing, 0.0, 1e-6);
  const auto back = geo::utm_to_latlon(500000.0, 0.0, 10, true);
  EXPECT_NEAR(back.lat, 0.0, 1e-12);
  EXPECT_NEAR(back.lon, -123.0, 1e-12);
  EXPECT_THROW(geo::utm_to_latlon(500000.0, 0.0, 0, true), ConfigError);
  EXPECT_THROW(geo::CoordinateSystem::utm(61, true), ConfigError);
  const auto pass = geo::CoordinateSystem::lat_lon().to_lat_lon(54.3, 24.4);
  EXPECT_EQ(pass.lon, 54.3);
  EXPECT_EQ(pass.lat, 24.4);
  const auto south = geo::latlon_to_utm({-33.9, 18.4}, 34, false);
  const auto sb = geo::utm_to_latlon(south.easting, south.northing, 34, false);
  EXPECT_NEAR(sb.lat, -33.9, 1e-7);
  EXPECT_NEAR(sb.lon, 18.4, 1e-7);
}

RegionSpec two_olu_region() {
  RegionSpec r;
  r.name = "pair";
  r.olu_boundaries = {{{0.0, -0.5}}, {{0.0, 0.5}}};
  return r;
}

TEST(Classify, EmptySetsUseInfinity) {
  const auto r = two_olu_region();
  const auto open = classify_point({0.3, 0.1}, ProtectionScenario({0, 0}, 1.0), r);
  EXPECT_EQ(open.c, 1);
  EXPECT_TRUE(std::isinf(open.d_prot));
  const auto closed = classify_point({0.3, 0.1}, ProtectionScenario({1, 1}, 1.0), r);
  EXPECT_EQ(closed.c, -1);
  EXPECT_TRUE(std::isinf(closed.d_unprot));
}

TEST(Classify, ExactTieIsPositive) {
  const auto r = two_olu_region();
  const auto pc = classify_point({0.7, 0.0}, ProtectionScenario({1, 0}, 1.0), r);
  EXPECT_EQ(pc.d_prot, pc.d_unprot);
  EXPECT_EQ(pc.c, 1);
  const auto swapped = classify_point({0.7, 0.0}, ProtectionScenario({0, 1}, 1.0), r);
  EXPECT_EQ(swapped.c, 1);
}

TEST(Classify, SwapInvarianceOnRandomRegions) {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    RegionSpec r;
    const std::size_t k = 2 + rng.below(6);
    r.olu_boundaries.resize(k);
    for (auto& b : r.olu_boundaries) {
      const std::size_t verts = 1 + rng.below(4);
      for (std::size_t v = 0; v < verts; ++v) b.push_back({rng.uniform(24, 25), rng.uniform(54, 55)});
    }
    std::vector<std::uint8_t> bits(k), flipped(k);
    for (std::size_t o = 0; o < k; ++o) {
      bits[o] = static_cast<std::uint8_t>(rng.below(2));
      flipped[o] = 1 - bits[o];
    }
    const LatLon p{rng.uniform(24, 25), rng.uniform(54, 55)};
    const auto a = classify_point(p, ProtectionScenario(bits, 1.0), r);
    const auto b = classify_point(p, ProtectionScenario(flipped, 1.0), r);
    EXPECT_EQ(a.d_prot, b.d_unprot);
    if (a.d_prot != a.d_unprot) {
      EXPECT_EQ(a.c, -b.c);
    } else {
      EXPECT_EQ(a.c, 1);
      EXPECT_EQ(b.c, 1);
    }
    // brute-force oracle over every vertex
    double dp = std::numeric_limits<double>::infinity(), du = dp;
    for (std::size_t o = 0; o < k; ++o) {
      for (const auto& v : r.olu_boundaries[o]) {
        const double d = static_cast<double>(oracle::sphere_distance_km(p.lat, p.lon, v.lat, v.lon, 6367.0L));
        (bits[o] ? dp : du) = std::min(bits[o] ? dp : du, d);
      }
    }
    EXPECT_EQ(a.c, du <= dp ? 1 : -1);
  }
}

TEST(Classify, ZeroOluIsError) {
  EXPECT_THROW(classify_from_distances(std::vector<double>{}, ProtectionScenario({}, 0.0)), ConfigError);
}

TEST(BuildSample, EmptyAndSinglePoint) {
  const auto r = two_olu_region();
  const GridSpec spec{16, 0.0, 15.0, 0.0, 15.0};
  InundationTable empty{ProtectionScenario({0, 0}, 0.5), {}};
  const auto e = build_sample(empty, r, spec);
  EXPECT_EQ(e.input.count_nonzero(), 0u);
  EXPECT_EQ(e.output.count_nonzero(), 0u);
  EXPECT_EQ(e.slr_m, 0.5);

  InundationTable one{ProtectionScenario({0, 0}, 1.0), {{7.0, 9.0, 2.5}}};
  const auto s = build_sample(one, r, spec);
  EXPECT_EQ(s.input.count_nonzero(), 1u);
  EXPECT_EQ(s.output.count_nonzero(), 1u);
  EXPECT_EQ(s.input.at(7, 9), 1.0f);
  EXPECT_EQ(s.output.at(7, 9), 2.5f);
  EXPECT_EQ(s.scenario_id, "00_1.0");
}

TEST(BuildSample, NonzeroCountEqualsPointCount) {
  const auto r = two_olu_region();
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(20));
    const std::size_t count = 1 + rng.below(static_cast<std::uint64_t>(n) * n);
    InundationTable t{ProtectionScenario({static_cast<std::uint8_t>(rng.below(2)), 1}, 1.0), {}};
    for (std::size_t k = 0; k < count; ++k) {
      t.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.bernoulli(0.5) ? rng.uniform(0.1, 3) : 0.0});
    }
    const auto spec = build_grid_spec(std::span<const InundationPoint>(t.points), n);
    const auto s = build_sample(t, r, spec);
    EXPECT_EQ(s.input.count_nonzero(), count);
    EXPECT_NO_THROW(s.validate());
  }
}

TEST(Footprint, InputMatchesBuildSampleAndRoundTrips) {
  const auto r = two_olu_region();
  std::vector<InundationPoint> pts;
  Rng rng(9);
  for (int k = 0; k < 60; ++k) pts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0});
  const auto spec = build_grid_spec(std::span<const InundationPoint>(pts), 12);
  const auto fp = build_footprint(pts, r, spec);
  const auto back = Footprint::from_container(TensorContainer::deserialize(fp.to_container().serialize()));
  for (auto bits : {std::vector<std::uint8_t>{0, 1}, {1, 0}, {1, 1}}) {
    const ProtectionScenario sc(bits, 1.0);
    const auto s = build_sample({sc, pts}, r, spec);
    EXPECT_EQ(back.input_for(sc), s.input);
  }
}

TEST(Histogram, ZeroMassAndNormalization) {
  Sample z;
  z.input = Grid(4);
  z.output = Grid(4);
  const std::vector<Sample> zeros = {z};
  const auto hz = pwl_histogram(zeros);
  EXPECT_EQ(hz.zero_mass, 1.0);
  EXPECT_NEAR(hz.total_mass(), 1.0, 1e-12);

  Rng rng(1);
  std::vector<Sample> many(5, z);
  for (auto& s : many) {
    for (auto& v : s.output.storage()) v = rng.bernoulli(0.3) ? static_cast<float>(rng.uniform(0, 4)) : 0.0f;
  }
  const auto h = pwl_histogram(many, 7);
  EXPECT_NEAR(h.total_mass(), 1.0, 1e-9);
  EXPECT_EQ(h.masses.size(), 7u);
  EXPECT_THROW(pwl_histogram(std::vector<Sample>{}), ConfigError);
}

TEST(Csv, RoundTripAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "coastsurr_csv";
  std::filesystem::create_directories(dir);
  InundationTable t{decode_scenario("01_0.5", 2), {{1.5, -2.25, 0.0}, {3.0, 4.0, 1.125}}};
  write_inundation_csv(dir / "01_0.5.csv", t);
  const auto back = read_inundation_csv(dir / "01_0.5.csv", 2);
  ASSERT_EQ(back.points.size(), 2u);
  EXPECT_EQ(back.points[1].pwl, 1.125);
  EXPECT_EQ(encode_scenario(back.scenario), "01_0.5");
  write_text_file(dir / "10_0.5.csv", "pwl, y ,x\n1,2,3\n");
  const auto reordered = read_inundation_csv(dir / "10_0.5.csv", 2);
  EXPECT_EQ(reordered.points[0].x, 3.0);
  write_text_file(dir / "11_0.5.csv", "x,y,pwl\n1,2\n");
  EXPECT_THROW(read_inundation_csv(dir / "11_0.5.csv", 2), ParseError);
  write_text_file(dir / "00_0.5.csv", "x,y,pwl\n1,abc,2\n");
  EXPECT_THROW(read_inundation_csv(dir / "00_0.5.csv", 2), ParseError);
}

}  // namespace
}  // namespace coastsurr
