/*
 * Copyright 2026 The t2t Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "t2t/image_io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <random>
#include <set>
#include <string>

#include "t2t/errors.hpp"
#include "t2t/parallel.hpp"

namespace t2t {
namespace {

PixelGrid Grid(int rows, int cols) { return PixelGrid{rows, cols, {-1.0, 2.0}, 0.25, 0.5}; }

TactileImage RandomImage(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-3.0f, 3.0f);
  TactileImage img(Grid(rows, cols));
  for (float& v : img.data()) v = u(rng);
  return img;
}

std::string HeaderOf(const std::vector<std::uint8_t>& bytes, std::size_t n) {
  return std::string(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(n));
}

TEST(PfmTest, HeaderAndBitExactRoundTrip) {
  const TactileImage img = RandomImage(5, 7, 1);
  const auto bytes = EncodePfm(img);
  const std::string header = "Pf\n7 5\n-1.0\n";
  EXPECT_EQ(HeaderOf(bytes, header.size()), header);
  EXPECT_EQ(bytes.size(), header.size() + 35 * 4);
  float first;
  std::memcpy(&first, bytes.data() + header.size(), 4);
  EXPECT_EQ(first, img.at(0, 0));
  EXPECT_EQ(DecodePfm(bytes, img.grid()), img);
  const TactileImage unit = DecodePfm(bytes);
  EXPECT_EQ(unit.rows(), 5);
  EXPECT_EQ(unit.cols(), 7);
  EXPECT_TRUE(std::equal(unit.data().begin(), unit.data().end(), img.data().begin()));
}

TEST(PfmTest, BigEndianFilesAreByteSwapped) {
  const std::string header = "Pf\n2 1\n1.0\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  for (float v : {1.5f, -2.0f}) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<std::uint8_t>(bits >> s));
  }
  const TactileImage img = DecodePfm(bytes);
  EXPECT_EQ(img.at(0, 0), 1.5f);
  EXPECT_EQ(img.at(0, 1), -2.0f);
}

TEST(PfmTest, MalformedInputsReportOffsets) {
  const auto bytes = EncodePfm(RandomImage(3, 4, 2));
  for (std::size_t cut : {std::size_t{0}, std::size_t{1}, std::size_t{5}, std::size_t{12}, bytes.size() - 1}) {
    const std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
    try {
      DecodePfm(t);
      ADD_FAILURE() << "accepted truncation at " << cut;
    } catch (const FormatError& e) {
      EXPECT_LE(e.offset(), cut);
    }
  }
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(DecodePfm(trailing), FormatError);
  const std::string color = "PF\n1 1\n-1.0\n";
  EXPECT_THROW(DecodePfm(std::vector<std::uint8_t>(color.begin(), color.end())), FormatError);
  const std::string zero_dim = "Pf\n0 1\n-1.0\n";
  EXPECT_THROW(DecodePfm(std::vector<std::uint8_t>(zero_dim.begin(), zero_dim.end())), FormatError);
  EXPECT_THROW(DecodePfm(bytes, Grid(4, 3)), ShapeMismatch);
}

TEST(PgmTest, UniformImageIsUniform) {
  TactileImage img(Grid(4, 6), 0.0f);
  PgmScale scale;
  const auto bytes = EncodePgm(img, &scale);
  const std::string header = "P5\n6 4\n255\n";
  EXPECT_EQ(HeaderOf(bytes, header.size()), header);
  ASSERT_EQ(bytes.size(), header.size() + 24);
  const std::set<std::uint8_t> values(bytes.begin() + static_cast<std::ptrdiff_t>(header.size()), bytes.end());
  EXPECT_EQ(values.size(), 1u);
  EXPECT_EQ(scale.min, 0.0f);
  EXPECT_EQ(scale.max, 0.0f);
}

TEST(PgmTest, MinMaxNormalizationWithTopRowFirst) {
  TactileImage img(Grid(2, 2));
  img.at(0, 0) = 10.0f;  // bottom-left
  img.at(0, 1) = 20.0f;
  img.at(1, 0) = 30.0f;  // top-left
  img.at(1, 1) = 50.0f;
  PgmScale scale;
  const auto bytes = EncodePgm(img, &scale);
  const std::size_t h = std::string("P5\n2 2\n255\n").size();
  EXPECT_EQ(scale.min, 10.0f);
  EXPECT_EQ(scale.max, 50.0f);
  EXPECT_EQ(bytes[h + 0], 128);  // (30 - 10) / 40 * 255 = 127.5
  EXPECT_EQ(bytes[h + 1], 255);
  EXPECT_EQ(bytes[h + 2], 0);
  EXPECT_EQ(bytes[h + 3], 64);  // 63.75
}

TEST(PgmTest, StripLayout) {
  std::vector<TactileImage> panels;
  for (int i = 0; i < 4; ++i) panels.push_back(RandomImage(3, 5, 10 + i));
  const int gutter = 2;
  EXPECT_EQ(StripWidth(5, 4, gutter), 4 * 5 + 3 * gutter);
  std::vector<PgmScale> scales;
  const auto bytes = EncodePgmStrip(panels, gutter, &scales);
  const std::string header = "P5\n" + std::to_string(StripWidth(5, 4, gutter)) + " 3\n255\n";
  EXPECT_EQ(HeaderOf(bytes, header.size()), header);
  EXPECT_EQ(bytes.size(), header.size() + 3u * StripWidth(5, 4, gutter));
  EXPECT_EQ(scales.size(), 4u);
  // Gutter columns stay white.
  for (int r = 0; r < 3; ++r) {
    for (int g = 0; g < 3; ++g) {
      for (int k = 0; k < gutter; ++k) {
        EXPECT_EQ(bytes[header.size() + r * StripWidth(5, 4, gutter) + (g + 1) * 5 + g * gutter + k], 255);
      }
    }
  }
  panels.push_back(RandomImage(3, 6, 20));
  EXPECT_THROW(EncodePgmStrip(panels, gutter), ShapeMismatch);
  EXPECT_THROW(EncodePgmStrip({}, gutter), InvalidArgument);
}

TEST(ParallelTest, VisitsEveryIndexOnce) {
  for (int threads : {1, 2, 4}) {
    std::vector<int> hits(1000, 0);
    ParallelFor(hits.size(), [&](std::size_t i) { ++hits[i]; }, threads);
    EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 1000);
  }
}

TEST(ParallelTest, ReportsSmallestFailingIndex) {
  for (int threads : {1, 3}) {
    try {
      ParallelFor(
          200,
          [](std::size_t i) {
            if (i == 37 || i == 150) throw std::runtime_error(std::to_string(i));
          },
          threads);
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "37");
    }
  }
}

TEST(ParallelTest, ThreadCountFromEnvironment) {
  setenv("T2T_THREADS", "3", 1);
  EXPECT_EQ(ThreadCount(), 3);
  setenv("T2T_THREADS", "0", 1);
  EXPECT_GE(ThreadCount(), 1);
  setenv("T2T_THREADS", "lots", 1);
  EXPECT_THROW(ThreadCount(), ConfigError);
  setenv("T2T_THREADS", "-2", 1);
  EXPECT_THROW(ThreadCount(), ConfigError);
  unsetenv("T2T_THREADS");
  EXPECT_GE(ThreadCount(), 1);
}

}  // namespace
}  // namespace t2t
