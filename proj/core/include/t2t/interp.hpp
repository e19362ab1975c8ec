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

#ifndef T2T_INTERP_HPP_
#define T2T_INTERP_HPP_

#include <array>
#include <vector>

#include "t2t/geometry.hpp"
#include "t2t/image.hpp"

namespace t2t {

// Array -> image rasterization by barycentric interpolation over the Delaunay
// triangulation of the taxel centers. Weights are computed once per
// (layout, grid) pair; applying the operator is a sparse weighted sum.
class PhiOperator {
 public:
  // Throws GridMismatch if any taxel center falls outside the grid extent.
  PhiOperator(const TaxelLayout& layout, const PixelGrid& grid);

  // Pixels outside the taxel hull are 0. Throws LengthMismatch.
  TactileImage Apply(std::span<const float> values) const;
  TactileImage Apply(const ArraySample& y) const { return Apply(y.values); }

  const PixelGrid& grid() const { return grid_; }
  std::size_t n_taxels() const { return n_taxels_; }
  std::size_t covered_pixels() const { return weights_.size(); }

 private:
  struct PixelWeights {
    std::size_t pixel;
    std::array<int, 3> taxel;
    std::array<double, 3> weight;
  };
  PixelGrid grid_;
  std::size_t n_taxels_;
  std::vector<PixelWeights> weights_;
};

TactileImage Phi(const ArraySample& y, const TaxelLayout& layout, const PixelGrid& grid);

// Four-tap bilinear stencil into a row-major image.
struct BilinearStencil {
  std::array<std::size_t, 4> index{};
  std::array<double, 4> weight{};
};

// Stencil sampling `grid` at physical point `p`. Throws OutOfBounds if p lies
// outside the span of pixel centers.
BilinearStencil MakeStencil(const PixelGrid& grid, Vec2 p);

// One stencil per taxel, in taxel order.
std::vector<BilinearStencil> TaxelStencils(const TaxelLayout& layout, const PixelGrid& grid);

// Image -> array: bilinear sample at every taxel center, clamped to
// [0, kFullScale]. Throws OutOfBounds.
ArraySample PhiInv(const TactileImage& image, const TaxelLayout& layout);

}  // namespace t2t

#endif  // T2T_INTERP_HPP_
