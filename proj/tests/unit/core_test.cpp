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

#include <cstring>
#include <filesystem>

#include "coastsurr/core/errors.hpp"
#include "coastsurr/core/io.hpp"
#include "coastsurr/core/random.hpp"
#include "coastsurr/core/scenario.hpp"
#include "coastsurr/core/tensor_container.hpp"

namespace coastsurr {
namespace {

TEST(Scenario, DecodesSeventeenBitName) {
  const auto s = decode_scenario("10101010101010101_0.5", 17);
  EXPECT_EQ(s.olu_count(), 17u);
  EXPECT_EQ(s.slr_m(), 0.5);
  EXPECT_EQ(s.protected_count(), 9u);
  EXPECT_TRUE(s.is_protected(0));
  EXPECT_FALSE(s.is_protected(1));
}

TEST(Scenario, EncodeDecodeRoundTrips) {
  for (const char* name : {"10101010101010101_0.5", "111000111000111000111000111000_1.0", "0_0.0",
                           "01_1.50", "1_2"}) {
    const std::string text(name);
    const auto bits = text.substr(0, text.find('_')).size();
    EXPECT_EQ(encode_scenario(decode_scenario(text, bits)), text);
  }
}

TEST(Scenario, RejectsWrongLength) {
  EXPECT_THROW(decode_scenario("10_0.5", 3), LengthError);
}

TEST(Scenario, ReportsBadCharacterPosition) {
  try {
    decode_scenario("1021_0.5", 4);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 2u);
  }
  EXPECT_THROW(decode_scenario("1010", 4), ParseError);
  EXPECT_THROW(decode_scenario("1010_x", 4), ParseError);
  EXPECT_THROW(decode_scenario("1010_-1", 4), ParseError);
}

TEST(Scenario, FormatsShortestSlr) {
  EXPECT_EQ(format_slr(0.5), "0.5");
  EXPECT_EQ(format_slr(1.0), "1.0");
  EXPECT_EQ(format_slr(1.25), "1.25");
  EXPECT_EQ(encode_scenario(ProtectionScenario({1, 0, 1}, 2.0)), "101_2.0");
}

TEST(Fixtures, CountsMatchReferenceLists) {
  EXPECT_EQ(load_fixture_scenarios(FixtureSet::kAdHoldout).size(), 32u);
  EXPECT_EQ(load_fixture_scenarios(FixtureSet::kSfHoldout).size(), 46u);
  EXPECT_EQ(load_fixture_scenarios(FixtureSet::kSfGeneralizability).size(), 32u);
}

TEST(Fixtures, EntriesAreDistinctAndSized) {
  for (auto set : {FixtureSet::kAdHoldout, FixtureSet::kSfHoldout, FixtureSet::kSfGeneralizability}) {
    const auto list = load_fixture_scenarios(set);
    for (std::size_t a = 0; a < list.size(); ++a) {
      EXPECT_EQ(list[a].olu_count(), fixture_olu_count(set));
      for (std::size_t b = a + 1; b < list.size(); ++b) EXPECT_FALSE(list[a] == list[b]);
    }
  }
}

TEST(Fixtures, MissingFileIsConfigError) {
  const auto tmp = std::filesystem::temp_directory_path() / "coastsurr_no_fixtures";
  std::filesystem::create_directories(tmp);
  ::setenv("COASTSURR_DATA_DIR", tmp.c_str(), 1);
  EXPECT_THROW(load_fixture_scenarios(FixtureSet::kAdHoldout), ConfigError);
  ::unsetenv("COASTSURR_DATA_DIR");
}

TEST(TensorContainer, RoundTripIsBitExact) {
  Rng rng(7);
  for (int n : {1, 3, 64, 1024}) {
    std::vector<float> data(static_cast<std::size_t>(n) * n);
    for (auto& v : data) v = static_cast<float>(rng.normal());
    data[0] = -0.0f;
    TensorContainer c;
    c.metadata["scenario"] = "101_0.5";
    c.add("grid", {n, n}, data);
    c.add("empty", {0}, {});
    const auto back = TensorContainer::deserialize(c.serialize());
    ASSERT_TRUE(back.has("grid"));
    EXPECT_EQ(back.get("grid").shape, (std::vector<std::int64_t>{n, n}));
    ASSERT_EQ(back.get("grid").data.size(), data.size());
    EXPECT_EQ(std::memcmp(back.get("grid").data.data(), data.data(), data.size() * sizeof(float)), 0);
    EXPECT_EQ(back.metadata["scenario"], "101_0.5");
    EXPECT_EQ(back.get("empty").data.size(), 0u);
  }
}

TEST(TensorContainer, HeaderBytesFollowLayout) {
  TensorContainer c;
  c.add("a", {2}, {1.0f, -2.0f});
  const std::string bytes = c.serialize();
  ASSERT_GE(bytes.size(), 16u);
  EXPECT_EQ(bytes.substr(0, 4), "CSTC");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  std::uint64_t h = 0;
  for (int k = 7; k >= 0; --k) h = (h << 8) | static_cast<unsigned char>(bytes[8 + k]);
  EXPECT_EQ(bytes.size(), 16 + h + 8);
  // 1.0f little-endian
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + h + 3]), 0x3F);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + h + 2]), 0x80);
}

TEST(TensorContainer, RejectsCorruptInput) {
  TensorContainer c;
  c.add("a", {4}, {1, 2, 3, 4});
  std::string bytes = c.serialize();
  EXPECT_THROW(TensorContainer::deserialize(bytes.substr(0, bytes.size() - 1)), ParseError);
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(TensorContainer::deserialize(bad), ParseError);
  EXPECT_THROW(TensorContainer::deserialize("CS"), ParseError);
  EXPECT_THROW(c.get("missing"), NotFoundError);
}

TEST(Sample, ContainerRoundTripKeepsMetadata) {
  Sample s;
  s.input = Grid(4);
  s.output = Grid(4);
  s.input.at(1, 2) = -1.0f;
  s.output.at(1, 2) = 0.75f;
  s.slr_m = 1.5;
  s.scenario_id = "10_1.5";
  const GridSpec g{4, 0, 1, 0, 2};
  const auto c = sample_to_container(s, "toy", g);
  const auto back = sample_from_container(TensorContainer::deserialize(c.serialize()));
  EXPECT_EQ(back.input, s.input);
  EXPECT_EQ(back.output, s.output);
  EXPECT_EQ(back.slr_m, 1.5);
  EXPECT_EQ(back.scenario_id, "10_1.5");
  EXPECT_EQ(grid_spec_from_json(c.metadata["grid"]), g);
}

TEST(Sample, ValidateCatchesUnsupportedOutput) {
  Sample s;
  s.input = Grid(2);
  s.output = Grid(2);
  s.output.at(0, 0) = 1.0f;
  EXPECT_THROW(s.validate(), ShapeError);
  s.input.at(0, 0) = 0.5f;
  EXPECT_THROW(s.validate(), ShapeError);
  s.input.at(0, 0) = 1.0f;
  EXPECT_NO_THROW(s.validate());
}

TEST(Region, JsonRoundTripAndValidation) {
  RegionSpec r;
  r.name = "toy";
  r.olu_boundaries = {{{1.0, 2.0}, {1.5, 2.5}}, {{3.0, 4.0}}};
  const auto back = region_from_json(region_to_json(r));
  ASSERT_EQ(back.olu_count(), 2u);
  EXPECT_EQ(back.olu_boundaries[0][1].lon, 2.5);
  nlohmann::json j = region_to_json(r);
  j["earth_radius_km"] = 6371.0;
  EXPECT_THROW(region_from_json(j), ConfigError);
  j = region_to_json(r);
  j["olus"][1]["index"] = 1;
  EXPECT_THROW(region_from_json(j), ConfigError);
}

TEST(Rng, StreamsAreDeterministicAndDistinct) {
  Rng a(42, 3), b(42, 3), c(42, 4);
  const auto x = a.next_u64();
  EXPECT_EQ(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  Rng u(1);
  for (int k = 0; k < 1000; ++k) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
    EXPECT_LT(u.below(7), 7u);
  }
}

}  // namespace
}  // namespace coastsurr
