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

#include "t2t/contact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "t2t/errors.hpp"

namespace t2t {

namespace {

constexpr double kPi = std::numbers::pi;

struct KindInfo {
  PrimitiveKind kind;
  std::string_view name;
  // Four printed variants, (a, b) per version.
  std::array<std::array<double, 2>, 4> versions;
};

// The square's second variant is sized so the default grid rule yields the
// 1.4 mm sampling resolution: 1.1 * side / 6 = 1.4.
constexpr std::array<KindInfo, 8> kKinds = {{
    {PrimitiveKind::kLineSmooth, "line_smooth", {{{2.0, 0.5}, {3.0, 0.8}, {4.0, 1.2}, {5.0, 1.5}}}},
    {PrimitiveKind::kSquare, "square", {{{5.5, 0.0}, {8.4 / 1.1, 0.0}, {10.0, 0.0}, {12.0, 0.0}}}},
    {PrimitiveKind::kEmptyCircle, "empty_circle", {{{4.0, 1.0}, {5.0, 1.2}, {6.0, 1.5}, {7.0, 1.8}}}},
    {PrimitiveKind::kCircle, "circle", {{{2.5, 0.0}, {3.5, 0.0}, {4.5, 0.0}, {5.5, 0.0}}}},
    {PrimitiveKind::kBump, "bump", {{{1.5, 4.0}, {2.0, 6.0}, {2.5, 8.0}, {3.0, 10.0}}}},
    {PrimitiveKind::kEmptySquare, "empty_square", {{{7.0, 1.0}, {9.0, 1.2}, {11.0, 1.5}, {13.0, 1.8}}}},
    {PrimitiveKind::kHemisphere, "hemisphere", {{{3.0, 0.0}, {4.0, 0.0}, {5.0, 0.0}, {6.0, 0.0}}}},
    {PrimitiveKind::kLineSharp, "line_sharp", {{{1.0, 0.0}, {1.5, 0.0}, {2.0, 0.0}, {2.5, 0.0}}}},
}};

const KindInfo& Info(PrimitiveKind kind) {
  for (const KindInfo& info : kKinds) {
    if (info.kind == kind) return info;
  }
  throw InvalidArgument("unknown primitive kind");
}

constexpr std::array<std::string_view, 5> kObjectNames = {"pliers", "clamp", "scissors",
                                                          "allen_key", "wrench"};

// Profile of a flat-topped ridge of width w whose two long edges are rounded
// with radius rho, as a function of the distance from the ridge axis.
double RoundedRidge(double dist, double width, double rho, double top) {
  const double half = 0.5 * width;
  if (dist > half) return 0.0;
  const double flat = half - rho;
  if (dist <= flat) return top;
  const double u = dist - flat;
  return std::max(0.0, top - rho + std::sqrt(std::max(0.0, rho * rho - u * u)));
}

double PartHeight(const ObjectPart& part, Vec2 p) {
  const Vec2 q = Rotate(p - part.center, -part.angle);
  switch (part.shape) {
    case ObjectPart::Shape::kBox:
      return (std::abs(q.x) <= 0.5 * part.length && std::abs(q.y) <= 0.5 * part.width) ? part.top
                                                                                        : 0.0;
    case ObjectPart::Shape::kCapsule: {
      const double along = std::clamp(q.x, -0.5 * part.length, 0.5 * part.length);
      const double d = Distance(q, {along, 0.0});
      if (d > part.radius) return 0.0;
      return std::max(0.0, part.top - part.radius + std::sqrt(part.radius * part.radius - d * d));
    }
    case ObjectPart::Shape::kRing: {
      const double r = Norm(q);
      return (r <= part.radius && r >= part.radius - part.width) ? part.top : 0.0;
    }
  }
  return 0.0;
}

ObjectPart Box(Vec2 center, double angle, double length, double width, double top) {
  return {ObjectPart::Shape::kBox, center, angle, length, width, 0.0, top};
}
ObjectPart Capsule(Vec2 from, Vec2 to, double radius, double top) {
  const Vec2 d = to - from;
  return {ObjectPart::Shape::kCapsule, 0.5 * (from + to), std::atan2(d.y, d.x), Norm(d), 0.0,
          radius, top};
}
ObjectPart Ring(Vec2 center, double radius, double width, double top) {
  return {ObjectPart::Shape::kRing, center, 0.0, 0.0, width, radius, top};
}

std::vector<ObjectShape> BuildObjects() {
  std::vector<ObjectShape> objects;
  {
    ObjectShape pliers{ObjectName::kPliers, {}, {}};
    pliers.parts = {
        Capsule({-70, 10}, {-5, 4}, 4.5, 7.0),
        Capsule({-70, -10}, {-5, -4}, 4.5, 7.0),
        Ring({8, 0}, 7.0, 2.5, 7.5),
        Ring({8, 0}, 3.0, 3.0, 7.8),
        Box({32, 0}, 0.0, 36.0, 11.0, 6.5),
    };
    for (int i = 0; i < 6; ++i) {
      pliers.parts.push_back(Box({18.0 + 5.0 * i, 0}, 0.0, 1.6, 11.0, 7.3));
    }
    pliers.keypoints = {Vec2{-35, 7}, Vec2{8, 0}, Vec2{28, 0}, Vec2{48, 0}};
    objects.push_back(pliers);
  }
  {
    ObjectShape clamp{ObjectName::kClamp, {}, {}};
    clamp.parts = {
        Box({0, 28}, 0.0, 64.0, 10.0, 8.0),
        Box({-27, 0}, 0.0, 10.0, 66.0, 8.0),
        Box({0, -28}, 0.0, 64.0, 10.0, 8.0),
        Capsule({14, -20}, {14, 22}, 3.0, 8.5),
        Ring({14, 22}, 5.0, 5.0, 8.2),
    };
    clamp.keypoints = {Vec2{-27, 0}, Vec2{0, 28}, Vec2{14, 0}, Vec2{26, -28}};
    objects.push_back(clamp);
  }
  {
    ObjectShape scissors{ObjectName::kScissors, {}, {}};
    scissors.parts = {
        Ring({-48, 13}, 12.0, 3.0, 5.0),
        Ring({-48, -13}, 12.0, 3.0, 5.0),
        Box({12, 0}, 0.06, 70.0, 6.0, 5.0),
        Box({12, 0}, -0.06, 70.0, 6.0, 5.0),
        Ring({-20, 0}, 4.0, 4.0, 6.0),
    };
    scissors.keypoints = {Vec2{-48, 23.5}, Vec2{-20, 0}, Vec2{15, 0}, Vec2{44, 0}};
    objects.push_back(scissors);
  }
  {
    ObjectShape allen{ObjectName::kAllenKey, {}, {}};
    allen.parts = {
        Capsule({0, 0}, {65, 0}, 2.5, 5.0),
        Capsule({0, 0}, {0, 25}, 2.5, 5.0),
    };
    allen.keypoints = {Vec2{40, 0}, Vec2{0, 0}, Vec2{0, 20}, Vec2{62, 0}};
    objects.push_back(allen);
  }
  {
    ObjectShape wrench{ObjectName::kWrench, {}, {}};
    wrench.parts = {
        Box({0, 0}, 0.0, 100.0, 12.0, 5.0),
        Ring({62, 0}, 14.0, 5.0, 5.5),
        Ring({-60, 0}, 11.0, 4.0, 5.5),
        Capsule({-45, 0}, {45, 0}, 2.0, 5.6),
    };
    wrench.keypoints = {Vec2{0, 0}, Vec2{62, 11.5}, Vec2{-60, 9}, Vec2{40, 0}};
    objects.push_back(wrench);
  }
  return objects;
}

// Base-plane gap to the highest visible indenter point, per grid pixel.
std::vector<double> GapField(const ContactScene& scene, const PixelGrid& grid, double* h_max) {
  std::vector<double> heights(grid.size());
  double top = 0.0;
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const double h = SceneHeight(scene, grid.PixelCenter(r, c));
      heights[static_cast<std::size_t>(r) * grid.cols + c] = h;
      top = std::max(top, h);
    }
  }
  for (double& h : heights) h = top - h;
  *h_max = top;
  return heights;
}

double CompressionSum(const std::vector<double>& gaps, double depth) {
  double total = 0.0;
  for (double g : gaps) {
    if (g < depth) total += depth - g;
  }
  return total;
}

std::vector<double> GaussianKernel(double sigma) {
  if (sigma <= 0.0) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

std::string_view KindName(PrimitiveKind kind) { return Info(kind).name; }

PrimitiveKind KindFromName(std::string_view name) {
  for (const KindInfo& info : kKinds) {
    if (info.name == name) return info.kind;
  }
  throw InvalidArgument("unknown primitive kind '" + std::string(name) + "'");
}

void ValidatePrimitive(const Primitive& prim) {
  if (prim.version < 1 || prim.version > kVersionsPerKind) {
    throw InvalidArgument("primitive version must be in 1..4");
  }
  if (!(prim.a > 0.0)) throw InvalidArgument("primitive dimensions must be positive");
  switch (prim.kind) {
    case PrimitiveKind::kLineSmooth:
      if (!(prim.b > 0.0) || prim.b > 0.5 * prim.a || prim.b > kFeatureHeightMm) {
        throw InvalidArgument("line_smooth needs 0 < edge radius <= width / 2");
      }
      break;
    case PrimitiveKind::kEmptyCircle:
      if (!(prim.b > 0.0) || prim.b >= prim.a) {
        throw InvalidArgument("empty_circle needs 0 < thickness < radius");
      }
      break;
    case PrimitiveKind::kBump:
      if (!(prim.b > 0.0) || prim.a > prim.b) {
        throw InvalidArgument("bump needs 0 < height <= curvature radius");
      }
      break;
    case PrimitiveKind::kEmptySquare:
      if (!(prim.b > 0.0) || 2.0 * prim.b >= prim.a) {
        throw InvalidArgument("empty_square needs 0 < 2 * thickness < side");
      }
      break;
    default:
      break;
  }
}

Primitive MakePrimitive(PrimitiveKind kind, int version) {
  if (version < 1 || version > kVersionsPerKind) {
    throw InvalidArgument("primitive version must be in 1..4");
  }
  const auto& dims = Info(kind).versions[version - 1];
  return Primitive{kind, version, dims[0], dims[1]};
}

std::vector<Primitive> PrimitiveCatalog() {
  std::vector<Primitive> out;
  for (PrimitiveKind kind : kAllPrimitiveKinds) {
    for (int v = 1; v <= kVersionsPerKind; ++v) out.push_back(MakePrimitive(kind, v));
  }
  return out;
}

double FootprintSide(const Primitive& prim) {
  switch (prim.kind) {
    case PrimitiveKind::kLineSmooth:
    case PrimitiveKind::kLineSharp:
      return kLineLengthMm;
    case PrimitiveKind::kSquare:
    case PrimitiveKind::kEmptySquare:
      return prim.a;
    case PrimitiveKind::kEmptyCircle:
    case PrimitiveKind::kCircle:
    case PrimitiveKind::kHemisphere:
      return 2.0 * prim.a;
    case PrimitiveKind::kBump:
      return 2.0 * std::sqrt(2.0 * prim.b * prim.a - prim.a * prim.a);
  }
  return 0.0;
}

double HeightField(const Primitive& prim, Vec2 p) {
  constexpr double kTop = kFeatureHeightMm;
  switch (prim.kind) {
    case PrimitiveKind::kLineSmooth:
      if (std::abs(p.x) > 0.5 * kLineLengthMm) return 0.0;
      return RoundedRidge(std::abs(p.y), prim.a, prim.b, kTop);
    case PrimitiveKind::kLineSharp:
      return (std::abs(p.x) <= 0.5 * kLineLengthMm && std::abs(p.y) <= 0.5 * prim.a) ? kTop : 0.0;
    case PrimitiveKind::kSquare:
      return (std::abs(p.x) <= 0.5 * prim.a && std::abs(p.y) <= 0.5 * prim.a) ? kTop : 0.0;
    case PrimitiveKind::kEmptySquare: {
      const double m = std::max(std::abs(p.x), std::abs(p.y));
      return (m <= 0.5 * prim.a && m >= 0.5 * prim.a - prim.b) ? kTop : 0.0;
    }
    case PrimitiveKind::kCircle:
      return Norm(p) <= prim.a ? kTop : 0.0;
    case PrimitiveKind::kEmptyCircle: {
      const double r = Norm(p);
      return (r <= prim.a && r >= prim.a - prim.b) ? kTop : 0.0;
    }
    case PrimitiveKind::kHemisphere: {
      const double r2 = Dot(p, p);
      return r2 <= prim.a * prim.a ? std::sqrt(prim.a * prim.a - r2) : 0.0;
    }
    case PrimitiveKind::kBump: {
      // Spherical cap of height a cut from a sphere of radius b.
      const double r2 = Dot(p, p);
      if (r2 >= prim.b * prim.b) return 0.0;
      return std::max(0.0, std::sqrt(prim.b * prim.b - r2) - (prim.b - prim.a));
    }
  }
  return 0.0;
}

std::string_view ObjectNameString(ObjectName name) {
  return kObjectNames[static_cast<std::size_t>(name)];
}

ObjectName ObjectFromName(std::string_view name) {
  for (std::size_t i = 0; i < kObjectNames.size(); ++i) {
    if (kObjectNames[i] == name) return static_cast<ObjectName>(i);
  }
  throw InvalidArgument("unknown object '" + std::string(name) + "'");
}

const ObjectShape& GetObject(ObjectName name) {
  static const std::vector<ObjectShape> objects = BuildObjects();
  return objects[static_cast<std::size_t>(name)];
}

double HeightField(const ObjectShape& object, Vec2 p) {
  double h = 0.0;
  for (const ObjectPart& part : object.parts) h = std::max(h, PartHeight(part, p));
  return h;
}

void ValidateScene(const ContactScene& scene) {
  if (!(scene.force > 0.0) || !std::isfinite(scene.force)) {
    throw InvalidArgument("contact force must be positive");
  }
  if (!(scene.orientation >= 0.0 && scene.orientation < 2.0 * kPi)) {
    throw InvalidArgument("orientation must lie in [0, 2pi)");
  }
  if (!std::isfinite(scene.position.x) || !std::isfinite(scene.position.y)) {
    throw InvalidArgument("contact position must be finite");
  }
  if (const auto* prim = std::get_if<Primitive>(&scene.indenter)) {
    ValidatePrimitive(*prim);
  } else {
    const auto& obj = std::get<ObjectContact>(scene.indenter);
    if (obj.keypoint < 0 || obj.keypoint >= 4) throw InvalidArgument("keypoint must be in 0..3");
  }
}

double SceneHeight(const ContactScene& scene, Vec2 p_sensor) {
  const Vec2 local = Rotate(p_sensor - scene.position, -scene.orientation);
  if (const auto* prim = std::get_if<Primitive>(&scene.indenter)) {
    return HeightField(*prim, local);
  }
  const auto& obj = std::get<ObjectContact>(scene.indenter);
  const ObjectShape& shape = GetObject(obj.object);
  return HeightField(shape, local + shape.keypoints[obj.keypoint]);
}

void ValidateLayer(const ElasticLayer& layer) {
  if (!(layer.stiffness > 0.0) || !(layer.thickness > 0.0) || !(layer.counts_per_pressure > 0.0)) {
    throw InvalidArgument("elastic layer needs positive stiffness, thickness and gain");
  }
  if (layer.saturation_raw != kFullScale) {
    throw InvalidArgument("saturation must be 40000 counts");
  }
}

double SolvePenetration(const ContactScene& scene, const ElasticLayer& layer,
                        const PixelGrid& grid) {
  return SolveContact(scene, layer, grid).penetration;
}

ContactSolution SolveContact(const ContactScene& scene, const ElasticLayer& layer,
                             const PixelGrid& grid) {
  ValidateScene(scene);
  ValidateLayer(layer);
  ValidateGrid(grid);
  double h_max = 0.0;
  const std::vector<double> gaps = GapField(scene, grid, &h_max);
  if (h_max <= 0.0) throw ForceUnreachable("indenter does not touch the sensor grid");

  const double scale = layer.stiffness * grid.PixelArea();
  const double target = scene.force;
  if (scale * CompressionSum(gaps, layer.thickness) < target) {
    throw ForceUnreachable("full-thickness compression cannot supply " +
                           std::to_string(scene.force) + " N");
  }

  double lo = 0.0, hi = layer.thickness;
  double depth = hi;
  for (int iter = 0; iter < 200; ++iter) {
    depth = 0.5 * (lo + hi);
    const double f = scale * CompressionSum(gaps, depth);
    if (std::abs(f - target) <= 1e-10 * target || hi - lo <= 1e-15) break;
    (f < target ? lo : hi) = depth;
  }

  ContactSolution out{depth, TactileImage(grid)};
  std::span<float> p = out.pressure.data();
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    p[i] = static_cast<float>(layer.stiffness * std::max(0.0, depth - gaps[i]));
  }
  return out;
}

TactileImage PressureField(const ContactScene& scene, const ElasticLayer& layer,
                           const PixelGrid& grid) {
  return SolveContact(scene, layer, grid).pressure;
}

double DiscRectOverlap(Vec2 center, double radius, double x0, double x1, double y0, double y1) {
  const double r = radius;
  // Work relative to the disc center.
  const double a = std::max(x0 - center.x, -r);
  const double b = std::min(x1 - center.x, r);
  const double lo_y = y0 - center.y, hi_y = y1 - center.y;
  if (a >= b || lo_y >= hi_y) return 0.0;

  // Antiderivative of sqrt(r^2 - t^2).
  auto chord_integral = [r](double t) {
    const double tt = std::clamp(t, -r, r);
    return 0.5 * (tt * std::sqrt(std::max(0.0, r * r - tt * tt)) + r * r * std::asin(tt / r));
  };

  std::vector<double> breaks = {a, b};
  for (double y : {lo_y, hi_y}) {
    if (std::abs(y) < r) {
      const double t = std::sqrt(r * r - y * y);
      for (double s : {-t, t}) {
        if (s > a && s < b) breaks.push_back(s);
      }
    }
  }
  std::sort(breaks.begin(), breaks.end());

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double s0 = breaks[i], s1 = breaks[i + 1];
    if (s1 <= s0) continue;
    const double mid = 0.5 * (s0 + s1);
    const double h = std::sqrt(std::max(0.0, r * r - mid * mid));
    // Within a piece the clipping pattern is fixed.
    if (std::min(hi_y, h) <= std::max(lo_y, -h)) continue;
    const double arc = chord_integral(s1) - chord_integral(s0);
    const double upper = hi_y < h ? hi_y * (s1 - s0) : arc;
    const double lower = lo_y > -h ? lo_y * (s1 - s0) : -arc;
    area += upper - lower;
  }
  return area;
}

ArraySample SenseArray(const TactileImage& pressure, const TaxelLayout& layout,
                       const ElasticLayer& layer, std::optional<SensorNoise> noise) {
  ValidateLayer(layer);
  const PixelGrid& g = pressure.grid();
  const double r = layout.sensing_radius();
  const double hx = 0.5 * g.spacing_x, hy = 0.5 * g.spacing_y;

  std::mt19937_64 rng(noise ? noise->seed : 0);
  std::normal_distribution<double> gauss(0.0, noise ? noise->sigma : 0.0);

  ArraySample out;
  out.layout_id = layout.id();
  out.values.resize(layout.n_taxels());
  for (std::size_t i = 0; i < layout.n_taxels(); ++i) {
    const Vec2 c = layout.positions()[i];
    const Vec2 lo = g.ToPixel({c.x - r, c.y - r});
    const Vec2 hi = g.ToPixel({c.x + r, c.y + r});
    if (lo.x < -0.5 - 1e-9 || lo.y < -0.5 - 1e-9 || hi.x > g.cols - 0.5 + 1e-9 ||
        hi.y > g.rows - 0.5 + 1e-9) {
      throw GridMismatch("sensing disc of taxel " + std::to_string(i) +
                         " extends beyond the pressure grid");
    }
    const int c0 = std::max(0, static_cast<int>(std::floor(lo.x)));
    const int c1 = std::min(g.cols - 1, static_cast<int>(std::ceil(hi.x)));
    const int r0 = std::max(0, static_cast<int>(std::floor(lo.y)));
    const int r1 = std::min(g.rows - 1, static_cast<int>(std::ceil(hi.y)));
    double force = 0.0;
    for (int row = r0; row <= r1; ++row) {
      for (int col = c0; col <= c1; ++col) {
        const float p = pressure.at(row, col);
        if (p == 0.0f) continue;
        const Vec2 pc = g.PixelCenter(row, col);
        force += p * DiscRectOverlap(c, r, pc.x - hx, pc.x + hx, pc.y - hy, pc.y + hy);
      }
    }
    double counts = force * layer.counts_per_pressure;
    if (noise && noise->sigma > 0.0) counts += gauss(rng);
    out.values[i] = static_cast<float>(std::round(std::clamp(counts, 0.0, layer.saturation_raw)));
  }
  return out;
}

TactileImage GaussianBlur(const TactileImage& image, double sigma_x_px, double sigma_y_px) {
  const std::vector<double> kx = GaussianKernel(sigma_x_px);
  const std::vector<double> ky = GaussianKernel(sigma_y_px);
  const int rx = static_cast<int>(kx.size() / 2), ry = static_cast<int>(ky.size() / 2);
  const int rows = image.rows(), cols = image.cols();

  std::vector<double> tmp(image.size(), 0.0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      const int k0 = std::max(-rx, -c), k1 = std::min(rx, cols - 1 - c);
      for (int k = k0; k <= k1; ++k) acc += kx[k + rx] * image.at(r, c + k);
      tmp[static_cast<std::size_t>(r) * cols + c] = acc;
    }
  }
  TactileImage out(image.grid());
  for (int r = 0; r < rows; ++r) {
    const int k0 = std::max(-ry, -r), k1 = std::min(ry, rows - 1 - r);
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int k = k0; k <= k1; ++k) acc += ky[k + ry] * tmp[static_cast<std::size_t>(r + k) * cols + c];
      out.at(r, c) = static_cast<float>(acc);
    }
  }
  return out;
}

TactileImage SenseCamera(const TactileImage& pressure, const ElasticLayer& layer,
                         const PixelGrid& camera_grid, const CameraModel& model,
                         std::optional<SensorNoise> noise) {
  ValidateLayer(layer);
  ValidateGrid(camera_grid);
  TactileImage depth = Resample(pressure, camera_grid, 0.0f);
  const double inv_k = 1.0 / layer.stiffness;
  for (float& v : depth.data()) {
    const double d = std::max(0.0, static_cast<double>(v)) * inv_k;
    v = static_cast<float>(1.0 - std::exp(-d / model.depth_scale_mm));
  }
  TactileImage out = GaussianBlur(depth, model.blur_sigma_mm / camera_grid.spacing_x,
                                  model.blur_sigma_mm / camera_grid.spacing_y);
  if (noise && noise->sigma > 0.0) {
    std::mt19937_64 rng(noise->seed);
    std::normal_distribution<double> gauss(0.0, noise->sigma);
    for (float& v : out.data()) v = static_cast<float>(v + gauss(rng));
  }
  for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

}  // namespace t2t
