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

#ifndef T2T_IMAGE_HPP_
#define T2T_IMAGE_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "t2t/geometry.hpp"

namespace t2t {

// Saturation count of the taxel sensor; every ArraySample lives in [0, kFullScale].
inline constexpr double kFullScale = 40000.0;

// Single-channel float image on a physical pixel grid.
class TactileImage {
 public:
  TactileImage() = default;
  explicit TactileImage(const PixelGrid& grid, float fill = 0.0f)
      : grid_(grid), data_(grid.size(), fill) {}
  // Throws ShapeMismatch unless data.size() == rows * cols.
  TactileImage(const PixelGrid& grid, std::vector<float> data);

  int rows() const { return grid_.rows; }
  int cols() const { return grid_.cols; }
  const PixelGrid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }

  float& at(int row, int col) { return data_[static_cast<std::size_t>(row) * grid_.cols + col]; }
  float at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * grid_.cols + col];
  }
  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::vector<float>& buffer() { return data_; }

  float MaxValue() const;
  float MinValue() const;
  double Sum() const;

  friend bool operator==(const TactileImage& a, const TactileImage& b) = default;

 private:
  PixelGrid grid_;
  std::vector<float> data_;
};

// Taxel-array reading: one count per taxel, stored as floats.
struct ArraySample {
  std::vector<float> values;
  std::string layout_id;

  std::size_t size() const { return values.size(); }
  friend bool operator==(const ArraySample& a, const ArraySample& b) = default;
};

// Clamps every value into [0, kFullScale].
void ClampToFullScale(std::span<float> values);

// Average-pools by an integer factor. Trailing rows/cols that do not fill a
// whole block are dropped. The result grid has spacing scaled by `factor`
// and its origin at the center of the first block.
TactileImage Downsample(const TactileImage& image, int factor);

// Grid produced by Downsample(image on `grid`, factor).
PixelGrid DownsampleGrid(const PixelGrid& grid, int factor);

// Bilinear resample of `image` onto `target` using physical coordinates;
// samples outside the source extent read as `outside`.
TactileImage Resample(const TactileImage& image, const PixelGrid& target, float outside = 0.0f);

}  // namespace t2t

#endif  // T2T_IMAGE_HPP_
