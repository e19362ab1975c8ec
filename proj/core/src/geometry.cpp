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

#include "t2t/geometry.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "t2t/errors.hpp"
#include "t2t/hash.hpp"

namespace t2t {

namespace {

using nlohmann::json;

double BoundingScale(std::span<const Vec2> points) {
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  for (const Vec2& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  return std::max({max_x - min_x, max_y - min_y, std::numeric_limits<double>::min()});
}

bool AllCollinear(std::span<const Vec2> points) {
  const double scale = BoundingScale(points);
  const double tol = 1e-12 * scale * scale;
  // Pick the farthest point from points[0] as the second anchor.
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = Distance(points[0], points[i]);
    if (d > best) {
      best = d;
      far = i;
    }
  }
  if (best <= 0.0) return true;
  for (const Vec2& p : points) {
    if (std::abs(SignedArea(points[0], points[far], p)) > tol) return false;
  }
  return true;
}

// Strict interior overlap of two counter-clockwise triangles by separating
// axes; touching along an edge or vertex does not count.
bool TrianglesOverlap(const std::array<Vec2, 3>& a, const std::array<Vec2, 3>& b, double eps) {
  auto separated_by_edges_of = [eps](const std::array<Vec2, 3>& t, const std::array<Vec2, 3>& u) {
    for (int e = 0; e < 3; ++e) {
      const Vec2 p = t[e];
      const Vec2 q = t[(e + 1) % 3];
      const Vec2 d = q - p;
      const double len = Norm(d);
      // Outward normal of a CCW edge.
      const Vec2 n{d.y / len, -d.x / len};
      double min_u = std::numeric_limits<double>::infinity();
      for (const Vec2& v : u) min_u = std::min(min_u, Dot(n, v - p));
      if (min_u >= -eps) return true;
    }
    return false;
  };
  return !separated_by_edges_of(a, b) && !separated_by_edges_of(b, a);
}

// Largest step such that every difference in `sorted_unique` is an integer
// multiple of it, or 0 when no such step exists at tolerance `tol`.
double LatticeStep(const std::vector<double>& sorted_unique, double tol) {
  if (sorted_unique.size() < 2) return 0.0;
  double step = 0.0;
  for (std::size_t i = 1; i < sorted_unique.size(); ++i) {
    double a = sorted_unique[i] - sorted_unique[0];
    double b = step;
    if (b == 0.0) {
      step = a;
      continue;
    }
    // Euclid on reals.
    if (a < b) std::swap(a, b);
    while (b > tol) {
      double r = std::fmod(a, b);
      if (b - r < tol) r = 0.0;
      a = b;
      b = r;
    }
    step = a;
  }
  const double span = sorted_unique.back() - sorted_unique.front();
  if (step < span * 1e-3) return 0.0;
  for (double v : sorted_unique) {
    const double k = (v - sorted_unique.front()) / step;
    if (std::abs(k - std::round(k)) * step > tol) return 0.0;
  }
  return step;
}

struct AxisFit {
  double origin;
  double spacing;
};

AxisFit FitAxis(std::vector<double> coords, double margin, int n_px) {
  std::sort(coords.begin(), coords.end());
  std::vector<double> unique;
  for (double v : coords) {
    if (unique.empty() || v - unique.back() > 1e-9) unique.push_back(v);
  }
  const double lo = unique.front();
  const double hi = unique.back();
  const double span = hi - lo;
  const int last = n_px - 1;

  const double step = LatticeStep(unique, 1e-7);
  if (step > 0.0) {
    const long span_steps = std::lround(span / step);
    int best_m = 0;
    for (int m = 1; m <= last; ++m) {
      const double spacing = step / m;
      const long margin_px = static_cast<long>(std::ceil(margin / spacing - 1e-9));
      if (span_steps * m + 2 * margin_px > last) break;
      best_m = m;
    }
    if (best_m > 0) {
      const double spacing = step / best_m;
      const long margin_px = static_cast<long>(std::ceil(margin / spacing - 1e-9));
      const long used = span_steps * best_m + 2 * margin_px;
      const long left = margin_px + (last - used) / 2;
      return {lo - left * spacing, spacing};
    }
  }
  const double spacing = (span + 2.0 * margin) / last;
  return {lo - margin, spacing};
}

}  // namespace

double SignedArea(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * Cross(b - a, c - a); }

TaxelLayout::TaxelLayout(std::vector<Vec2> positions, double pitch_mm, double sensing_radius_mm)
    : positions_(std::move(positions)), pitch_(pitch_mm), sensing_radius_(sensing_radius_mm) {
  if (positions_.size() < 3) {
    throw InvalidArgument("a taxel layout needs at least 3 taxels, got " +
                          std::to_string(positions_.size()));
  }
  if (!(pitch_ > 0.0) || !(sensing_radius_ > 0.0)) {
    throw InvalidArgument("pitch and sensing radius must be positive");
  }
  for (const Vec2& p : positions_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidArgument("taxel positions must be finite");
    }
  }
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    for (std::size_t j = i + 1; j < positions_.size(); ++j) {
      if (Distance(positions_[i], positions_[j]) < 0.5 * pitch_ - 1e-12) {
        throw InvalidArgument("taxels " + std::to_string(i) + " and " + std::to_string(j) +
                              " are closer than half a pitch");
      }
    }
  }
  if (AllCollinear(positions_)) throw DegenerateInput("taxel centers are collinear");
  id_ = "layout-" + Sha256Hex(LayoutToJson(*this)).substr(0, 16);
}

void ValidateGrid(const PixelGrid& grid) {
  if (grid.rows <= 0 || grid.cols <= 0 || !(grid.spacing_x > 0.0) || !(grid.spacing_y > 0.0)) {
    throw InvalidArgument("pixel grid needs positive rows, cols and spacing");
  }
}

TaxelLayout BuildDefaultLayout() {
  constexpr double kPitch = 7.5;
  constexpr double kSensingRadius = 2.5;
  const double row_step = kPitch * std::sqrt(3.0) / 2.0;
  constexpr std::array<int, 4> kRowCounts = {4, 5, 6, 5};

  std::vector<Vec2> positions;
  for (std::size_t r = 0; r < kRowCounts.size(); ++r) {
    const int n = kRowCounts[r];
    const double y = (static_cast<double>(r) - 1.5) * row_step;
    for (int i = 0; i < n; ++i) {
      positions.push_back({(i - (n - 1) / 2.0) * kPitch, y});
    }
  }
  Vec2 centroid;
  for (const Vec2& p : positions) centroid = centroid + p;
  centroid = (1.0 / positions.size()) * centroid;
  for (Vec2& p : positions) p = p - centroid;
  return TaxelLayout(std::move(positions), kPitch, kSensingRadius);
}

Triangulation Delaunay(std::span<const Vec2> points) {
  const std::size_t n = points.size();
  if (n < 3) throw DegenerateInput("triangulation needs at least 3 points");
  if (AllCollinear(points)) throw DegenerateInput("all points are collinear");

  const double scale = BoundingScale(points);
  const double area_tol = 1e-12 * scale * scale;

  std::vector<std::array<int, 3>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec2 a = points[i], b = points[j], c = points[k];
        const double area = SignedArea(a, b, c);
        if (std::abs(area) <= area_tol) continue;
        // Circumcenter relative to a.
        const Vec2 ab = b - a, ac = c - a;
        const double d = 2.0 * Cross(ab, ac);
        const double ab2 = Dot(ab, ab), ac2 = Dot(ac, ac);
        const Vec2 center = a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
        const double r2 = Dot(center - a, center - a);
        bool empty = true;
        for (std::size_t m = 0; m < n && empty; ++m) {
          if (m == i || m == j || m == k) continue;
          const Vec2 dm = points[m] - center;
          if (Dot(dm, dm) < r2 * (1.0 - 1e-9)) empty = false;
        }
        if (!empty) continue;
        std::array<int, 3> tri = {static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)};
        if (area < 0.0) std::swap(tri[1], tri[2]);
        candidates.push_back(tri);
      }
    }
  }

  // Candidates are generated in lexicographic order of (i, j, k); greedily keep
  // the non-overlapping ones, which only matters for cocircular groups.
  const double overlap_eps = 1e-9 * scale;
  Triangulation out;
  std::vector<std::array<Vec2, 3>> accepted;
  for (const auto& tri : candidates) {
    const std::array<Vec2, 3> verts = {points[tri[0]], points[tri[1]], points[tri[2]]};
    bool overlaps = false;
    for (const auto& other : accepted) {
      if (TrianglesOverlap(verts, other, overlap_eps)) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) continue;
    accepted.push_back(verts);
    out.triangles.push_back(tri);
  }
  return out;
}

Triangulation Delaunay(const TaxelLayout& layout) { return Delaunay(layout.positions()); }

std::optional<PointLocation> Locate(const Triangulation& tri, std::span<const Vec2> points,
                                    Vec2 p) {
  for (std::size_t t = 0; t < tri.triangles.size(); ++t) {
    const auto& v = tri.triangles[t];
    const Vec2 a = points[v[0]], b = points[v[1]], c = points[v[2]];
    const double area = SignedArea(a, b, c);
    std::array<double, 3> lambda = {SignedArea(p, b, c) / area, SignedArea(a, p, c) / area, 0.0};
    lambda[2] = 1.0 - lambda[0] - lambda[1];
    if (lambda[0] >= -1e-9 && lambda[1] >= -1e-9 && lambda[2] >= -1e-9) {
      return PointLocation{static_cast<int>(t), lambda};
    }
  }
  return std::nullopt;
}

std::vector<int> ConvexHull(std::span<const Vec2> points, bool include_collinear) {
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return points[a].x < points[b].x || (points[a].x == points[b].x && points[a].y < points[b].y);
  });
  if (order.size() < 3) return order;

  const double scale = BoundingScale(points);
  const double tol = 1e-12 * scale * scale;
  // Pop while the turn is clockwise (or straight, unless collinear points
  // are kept).
  auto must_pop = [&](int o, int a, int b) {
    const double turn = Cross(points[a] - points[o], points[b] - points[o]);
    return include_collinear ? turn < -tol : turn <= tol;
  };

  std::vector<int> hull(2 * order.size());
  std::size_t k = 0;
  for (int idx : order) {
    while (k >= 2 && must_pop(hull[k - 2], hull[k - 1], idx)) --k;
    hull[k++] = idx;
  }
  for (std::size_t i = order.size() - 1, lower = k + 1; i-- > 0;) {
    const int idx = order[i];
    while (k >= lower && must_pop(hull[k - 2], hull[k - 1], idx)) --k;
    hull[k++] = idx;
  }
  hull.resize(k - 1);
  return hull;
}

PixelGrid FitTactileGrid(const TaxelLayout& layout, int cols, int rows) {
  if (cols < 2 || rows < 2) throw InvalidArgument("tactile grid needs at least 2x2 pixels");
  std::vector<double> xs, ys;
  for (const Vec2& p : layout.positions()) {
    xs.push_back(p.x);
    ys.push_back(p.y);
  }
  const AxisFit fx = FitAxis(std::move(xs), layout.pitch(), cols);
  const AxisFit fy = FitAxis(std::move(ys), layout.pitch(), rows);
  return PixelGrid{rows, cols, {fx.origin, fy.origin}, fx.spacing, fy.spacing};
}

PixelGrid FitCameraGrid(const PixelGrid& tactile, int cols, int rows) {
  ValidateGrid(tactile);
  if (cols < 1 || rows < 1) throw InvalidArgument("camera grid needs positive dimensions");
  const double width = tactile.cols * tactile.spacing_x;
  const double height = tactile.rows * tactile.spacing_y;
  const double spacing = std::max(width / cols, height / rows);
  const Vec2 center = 0.5 * (tactile.MinCenter() + tactile.MaxCenter());
  const Vec2 origin{center.x - 0.5 * (cols - 1) * spacing, center.y - 0.5 * (rows - 1) * spacing};
  return PixelGrid{rows, cols, origin, spacing, spacing};
}

std::string LayoutToJson(const TaxelLayout& layout) {
  json positions = json::array();
  for (const Vec2& p : layout.positions()) positions.push_back({p.x, p.y});
  json j;
  j["n_taxels"] = layout.n_taxels();
  j["pitch_mm"] = layout.pitch();
  j["sensing_radius_mm"] = layout.sensing_radius();
  j["positions_mm"] = std::move(positions);
  return j.dump();
}

TaxelLayout LayoutFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("layout manifest is not valid JSON: ") + e.what(), e.byte);
  }
  try {
    std::vector<Vec2> positions;
    for (const auto& p : j.at("positions_mm")) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("positions_mm entries must be [x, y]");
      positions.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    const auto n = j.at("n_taxels").get<std::size_t>();
    if (n != positions.size()) {
      throw ConfigError("n_taxels (" + std::to_string(n) + ") does not match positions_mm (" +
                        std::to_string(positions.size()) + ")");
    }
    return TaxelLayout(std::move(positions), j.at("pitch_mm").get<double>(),
                       j.at("sensing_radius_mm").get<double>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("layout manifest: ") + e.what());
  }
}

TaxelLayout LoadLayout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open layout file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return LayoutFromJson(buffer.str());
}

void SaveLayout(const TaxelLayout& layout, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write layout file " + path);
  out << nlohmann::json::parse(LayoutToJson(layout)).dump(2) << '\n';
  if (!out) throw IoError("failed writing layout file " + path);
}

}  // namespace t2t
