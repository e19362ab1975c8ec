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

#include "t2t/interp.hpp"

#include <algorithm>
#include <cmath>

#include "t2t/errors.hpp"

namespace t2t {

namespace {

void CheckGridCovers(const TaxelLayout& layout, const PixelGrid& grid) {
  const Vec2 lo = grid.MinCenter();
  const Vec2 hi = grid.MaxCenter();
  const double tol_x = 1e-9 * grid.spacing_x, tol_y = 1e-9 * grid.spacing_y;
  for (std::size_t i = 0; i < layout.n_taxels(); ++i) {
    const Vec2 p = layout.positions()[i];
    if (p.x < lo.x - tol_x || p.x > hi.x + tol_x || p.y < lo.y - tol_y || p.y > hi.y + tol_y) {
      throw GridMismatch("taxel " + std::to_string(i) + " lies outside the image grid extent");
    }
  }
}

}  // namespace

PhiOperator::PhiOperator(const TaxelLayout& layout, const PixelGrid& grid)
    : grid_(grid), n_taxels_(layout.n_taxels()) {
  ValidateGrid(grid);
  CheckGridCovers(layout, grid);
  const Triangulation tri = Delaunay(layout);
  const auto& pts = layout.positions();

  // Restrict the per-pixel search to each triangle's bounding box; the first
  // (lowest-index) triangle claiming a pixel keeps it.
  std::vector<char> claimed(grid.size(), 0);
  std::vector<PixelWeights> weights;
  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    const auto& v = tri.triangles[t];
    const Vec2 a = pts[v[0]], b = pts[v[1]], c = pts[v[2]];
    const double area = SignedArea(a, b, c);
    const Vec2 pa = grid.ToPixel(a), pb = grid.ToPixel(b), pc = grid.ToPixel(c);
    const int c_lo = std::max(0, static_cast<int>(std::floor(std::min({pa.x, pb.x, pc.x}))) - 1);
    const int c_hi =
        std::min(grid.cols - 1, static_cast<int>(std::ceil(std::max({pa.x, pb.x, pc.x}))) + 1);
    const int r_lo = std::max(0, static_cast<int>(std::floor(std::min({pa.y, pb.y, pc.y}))) - 1);
    const int r_hi =
        std::min(grid.rows - 1, static_cast<int>(std::ceil(std::max({pa.y, pb.y, pc.y}))) + 1);
    for (int r = r_lo; r <= r_hi; ++r) {
      for (int col = c_lo; col <= c_hi; ++col) {
        const std::size_t pixel = static_cast<std::size_t>(r) * grid.cols + col;
        if (claimed[pixel]) continue;
        const Vec2 p = grid.PixelCenter(r, col);
        const double l0 = SignedArea(p, b, c) / area;
        const double l1 = SignedArea(a, p, c) / area;
        const double l2 = 1.0 - l0 - l1;
        if (l0 < -1e-9 || l1 < -1e-9 || l2 < -1e-9) continue;
        claimed[pixel] = 1;
        weights.push_back({pixel, v, {l0, l1, l2}});
      }
    }
  }
  std::sort(weights.begin(), weights.end(),
            [](const PixelWeights& x, const PixelWeights& y) { return x.pixel < y.pixel; });
  weights_ = std::move(weights);
}

TactileImage PhiOperator::Apply(std::span<const float> values) const {
  if (values.size() != n_taxels_) {
    throw LengthMismatch("array has " + std::to_string(values.size()) + " values, layout has " +
                         std::to_string(n_taxels_) + " taxels");
  }
  TactileImage out(grid_);
  std::span<float> data = out.data();
  for (const PixelWeights& pw : weights_) {
    const double v = pw.weight[0] * values[pw.taxel[0]] + pw.weight[1] * values[pw.taxel[1]] +
                     pw.weight[2] * values[pw.taxel[2]];
    data[pw.pixel] = static_cast<float>(v);
  }
  return out;
}

TactileImage Phi(const ArraySample& y, const TaxelLayout& layout, const PixelGrid& grid) {
  return PhiOperator(layout, grid).Apply(y);
}

BilinearStencil MakeStencil(const PixelGrid& grid, Vec2 p) {
  const Vec2 uv = grid.ToPixel(p);
  constexpr double kTol = 1e-9;
  if (!(uv.x >= -kTol && uv.y >= -kTol && uv.x <= grid.cols - 1 + kTol &&
        uv.y <= grid.rows - 1 + kTol)) {
    throw OutOfBounds("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                      ") maps outside the image");
  }
  const int c0 = std::clamp(static_cast<int>(std::floor(uv.x)), 0, std::max(0, grid.cols - 2));
  const int r0 = std::clamp(static_cast<int>(std::floor(uv.y)), 0, std::max(0, grid.rows - 2));
  const int c1 = std::min(c0 + 1, grid.cols - 1);
  const int r1 = std::min(r0 + 1, grid.rows - 1);
  const double fx = std::clamp(uv.x - c0, 0.0, 1.0);
  const double fy = std::clamp(uv.y - r0, 0.0, 1.0);
  auto idx = [&](int r, int c) { return static_cast<std::size_t>(r) * grid.cols + c; };
  BilinearStencil s;
  s.index = {idx(r0, c0), idx(r0, c1), idx(r1, c0), idx(r1, c1)};
  s.weight = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
  return s;
}

std::vector<BilinearStencil> TaxelStencils(const TaxelLayout& layout, const PixelGrid& grid) {
  std::vector<BilinearStencil> stencils;
  stencils.reserve(layout.n_taxels());
  for (const Vec2& p : layout.positions()) stencils.push_back(MakeStencil(grid, p));
  return stencils;
}

ArraySample PhiInv(const TactileImage& image, const TaxelLayout& layout) {
  const auto stencils = TaxelStencils(layout, image.grid());
  ArraySample y;
  y.layout_id = layout.id();
  y.values.resize(stencils.size());
  std::span<const float> data = image.data();
  for (std::size_t i = 0; i < stencils.size(); ++i) {
    double v = 0.0;
    for (int k = 0; k < 4; ++k) v += stencils[i].weight[k] * data[stencils[i].index[k]];
    y.values[i] = static_cast<float>(v);
  }
  ClampToFullScale(y.values);
  return y;
}

}  // namespace t2t
