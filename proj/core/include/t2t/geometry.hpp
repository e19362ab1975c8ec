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

#ifndef T2T_GEOMETRY_HPP_
#define T2T_GEOMETRY_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace t2t {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double Dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double Cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double Norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double Distance(Vec2 a, Vec2 b) { return Norm(a - b); }

// Rotates `p` counter-clockwise by `angle` radians about the origin.
inline Vec2 Rotate(Vec2 p, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

// Planar taxel array: centers in mm (sensor frame), lattice pitch and the
// radius of the disc each taxel integrates pressure over.
class TaxelLayout {
 public:
  // Throws InvalidArgument if fewer than 3 taxels, non-positive pitch or
  // radius, or two centers closer than half a pitch. Throws DegenerateInput
  // if all centers are collinear.
  TaxelLayout(std::vector<Vec2> positions, double pitch_mm, double sensing_radius_mm);

  const std::vector<Vec2>& positions() const { return positions_; }
  std::size_t n_taxels() const { return positions_.size(); }
  double pitch() const { return pitch_; }
  double sensing_radius() const { return sensing_radius_; }

  // Stable identifier derived from the canonical serialized form.
  const std::string& id() const { return id_; }

  friend bool operator==(const TaxelLayout& a, const TaxelLayout& b) {
    return a.positions_ == b.positions_ && a.pitch_ == b.pitch_ &&
           a.sensing_radius_ == b.sensing_radius_;
  }

 private:
  std::vector<Vec2> positions_;
  double pitch_;
  double sensing_radius_;
  std::string id_;
};

// Regular raster on the sensor plane. Pixel (r, c) has its center at
// origin + (c * spacing_x, r * spacing_y); rows run along +y.
struct PixelGrid {
  int rows = 0;
  int cols = 0;
  Vec2 origin;
  double spacing_x = 1.0;
  double spacing_y = 1.0;

  Vec2 PixelCenter(int row, int col) const {
    return {origin.x + col * spacing_x, origin.y + row * spacing_y};
  }
  // Fractional (col, row) coordinates of a physical point.
  Vec2 ToPixel(Vec2 p) const {
    return {(p.x - origin.x) / spacing_x, (p.y - origin.y) / spacing_y};
  }
  double PixelArea() const { return spacing_x * spacing_y; }
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
  // Physical extent spanned by pixel centers.
  Vec2 MinCenter() const { return origin; }
  Vec2 MaxCenter() const { return PixelCenter(rows - 1, cols - 1); }

  friend bool operator==(const PixelGrid& a, const PixelGrid& b) = default;
};

// Throws InvalidArgument unless rows, cols and both spacings are positive.
void ValidateGrid(const PixelGrid& grid);

// Triangles index into the point set they were built from and are stored
// counter-clockwise.
struct Triangulation {
  std::vector<std::array<int, 3>> triangles;
};

struct PointLocation {
  int triangle = -1;
  std::array<double, 3> barycentric{};
};

// 20 taxels, staggered rows of 4/5/6/5 on a triangular lattice of pitch
// 7.5 mm, centroid at the origin, 2.5 mm sensing radius.
TaxelLayout BuildDefaultLayout();

// Delaunay triangulation by exhaustive empty-circumcircle search. Cocircular
// ties are resolved by accepting candidate triangles in lexicographic order of
// their sorted vertex indices, skipping any that overlap an accepted one.
// O(n^4); intended for taxel arrays (tens to low hundreds of points).
// Throws DegenerateInput if fewer than 3 points or all points are collinear.
Triangulation Delaunay(std::span<const Vec2> points);
Triangulation Delaunay(const TaxelLayout& layout);

// Containing triangle and barycentric coordinates, or nullopt outside the
// hull. Points on shared edges go to the lowest-index triangle.
std::optional<PointLocation> Locate(const Triangulation& tri, std::span<const Vec2> points,
                                    Vec2 p);

// Indices of points on the convex hull boundary in counter-clockwise order.
// With include_collinear, points lying on hull edges are kept as well.
std::vector<int> ConvexHull(std::span<const Vec2> points, bool include_collinear);

double SignedArea(Vec2 a, Vec2 b, Vec2 c);

// Tactile image grid for the array sensor: the layout hull plus one pitch of
// margin on every side. When the taxel coordinates sit on a lattice along an
// axis, the spacing on that axis is an integer fraction of the lattice step
// and the origin is aligned so every taxel lands on a pixel center.
PixelGrid FitTactileGrid(const TaxelLayout& layout, int cols = 396, int rows = 240);

// Square-pixel camera grid covering the whole extent of `tactile`, centered
// on it.
PixelGrid FitCameraGrid(const PixelGrid& tactile, int cols = 320, int rows = 240);

// JSON manifest with n_taxels, pitch_mm, sensing_radius_mm, positions_mm.
std::string LayoutToJson(const TaxelLayout& layout);
TaxelLayout LayoutFromJson(const std::string& text);
TaxelLayout LoadLayout(const std::string& path);
void SaveLayout(const TaxelLayout& layout, const std::string& path);

}  // namespace t2t

#endif  // T2T_GEOMETRY_HPP_
