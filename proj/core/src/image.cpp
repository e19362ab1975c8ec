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

#include "t2t/image.hpp"

#include <algorithm>
#include <cmath>

#include "t2t/errors.hpp"

namespace t2t {

TactileImage::TactileImage(const PixelGrid& grid, std::vector<float> data)
    : grid_(grid), data_(std::move(data)) {
  if (data_.size() != grid_.size()) {
    throw ShapeMismatch("image buffer has " + std::to_string(data_.size()) + " values, grid needs " +
                        std::to_string(grid_.size()));
  }
}

float TactileImage::MaxValue() const {
  return data_.empty() ? 0.0f : *std::max_element(data_.begin(), data_.end());
}

float TactileImage::MinValue() const {
  return data_.empty() ? 0.0f : *std::min_element(data_.begin(), data_.end());
}

double TactileImage::Sum() const {
  double total = 0.0;
  for (float v : data_) total += v;
  return total;
}

void ClampToFullScale(std::span<float> values) {
  for (float& v : values) v = std::clamp(v, 0.0f, static_cast<float>(kFullScale));
}

PixelGrid DownsampleGrid(const PixelGrid& src, int factor) {
  if (factor < 1) throw InvalidArgument("downsample factor must be >= 1");
  PixelGrid dst;
  dst.rows = src.rows / factor;
  dst.cols = src.cols / factor;
  if (dst.rows == 0 || dst.cols == 0) throw ShapeMismatch("image smaller than downsample factor");
  dst.spacing_x = src.spacing_x * factor;
  dst.spacing_y = src.spacing_y * factor;
  dst.origin = {src.origin.x + 0.5 * (factor - 1) * src.spacing_x,
                src.origin.y + 0.5 * (factor - 1) * src.spacing_y};
  return dst;
}

TactileImage Downsample(const TactileImage& image, int factor) {
  if (factor < 1) throw InvalidArgument("downsample factor must be >= 1");
  if (factor == 1) return image;
  const PixelGrid dst = DownsampleGrid(image.grid(), factor);
  TactileImage out(dst);
  const double norm = 1.0 / (factor * factor);
  for (int r = 0; r < dst.rows; ++r) {
    for (int c = 0; c < dst.cols; ++c) {
      double acc = 0.0;
      for (int dr = 0; dr < factor; ++dr) {
        for (int dc = 0; dc < factor; ++dc) acc += image.at(r * factor + dr, c * factor + dc);
      }
      out.at(r, c) = static_cast<float>(acc * norm);
    }
  }
  return out;
}

TactileImage Resample(const TactileImage& image, const PixelGrid& target, float outside) {
  const PixelGrid& src = image.grid();
  if (src == target) return image;
  TactileImage out(target);
  for (int r = 0; r < target.rows; ++r) {
    for (int c = 0; c < target.cols; ++c) {
      const Vec2 uv = src.ToPixel(target.PixelCenter(r, c));
      if (uv.x < -1e-9 || uv.y < -1e-9 || uv.x > src.cols - 1 + 1e-9 ||
          uv.y > src.rows - 1 + 1e-9) {
        out.at(r, c) = outside;
        continue;
      }
      const int c0 = std::clamp(static_cast<int>(std::floor(uv.x)), 0, std::max(0, src.cols - 2));
      const int r0 = std::clamp(static_cast<int>(std::floor(uv.y)), 0, std::max(0, src.rows - 2));
      const int c1 = std::min(c0 + 1, src.cols - 1);
      const int r1 = std::min(r0 + 1, src.rows - 1);
      const double fx = std::clamp(uv.x - c0, 0.0, 1.0);
      const double fy = std::clamp(uv.y - r0, 0.0, 1.0);
      const double top = (1 - fx) * image.at(r0, c0) + fx * image.at(r0, c1);
      const double bottom = (1 - fx) * image.at(r1, c0) + fx * image.at(r1, c1);
      out.at(r, c) = static_cast<float>((1 - fy) * top + fy * bottom);
    }
  }
  return out;
}

}  // namespace t2t
