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

#ifndef T2T_CONTACT_HPP_
#define T2T_CONTACT_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "t2t/geometry.hpp"
#include "t2t/image.hpp"

namespace t2t {

enum class PrimitiveKind {
  kLineSmooth,
  kSquare,
  kEmptyCircle,
  kCircle,
  kBump,
  kEmptySquare,
  kHemisphere,
  kLineSharp,
};

inline constexpr std::array<PrimitiveKind, 8> kAllPrimitiveKinds = {
    PrimitiveKind::kLineSmooth, PrimitiveKind::kSquare,      PrimitiveKind::kEmptyCircle,
    PrimitiveKind::kCircle,     PrimitiveKind::kBump,        PrimitiveKind::kEmptySquare,
    PrimitiveKind::kHemisphere, PrimitiveKind::kLineSharp,
};

inline constexpr int kVersionsPerKind = 4;

// Extrusion height of flat-topped features and the length of both line kinds.
inline constexpr double kFeatureHeightMm = 3.0;
inline constexpr double kLineLengthMm = 16.0;

std::string_view KindName(PrimitiveKind kind);
// Throws InvalidArgument for unknown names.
PrimitiveKind KindFromName(std::string_view name);

// Indenter feature in its local frame, centered at the origin. Meaning of
// the two dimensions (mm) by kind:
//   line_smooth   a = width, b = edge radius (b <= a/2)
//   square        a = side
//   empty_circle  a = outer radius, b = edge thickness (b < a)
//   circle        a = radius
//   bump          a = height, b = curvature radius (a <= b)
//   empty_square  a = side, b = edge thickness (2b < a)
//   hemisphere    a = radius
//   line_sharp    a = width
// Lines run along the local x axis with length kLineLengthMm.
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kCircle;
  int version = 1;
  double a = 1.0;
  double b = 0.0;

  friend bool operator==(const Primitive&, const Primitive&) = default;
};

// Throws InvalidArgument if dimensions are non-positive or inconsistent, or
// the version lies outside 1..4.
void ValidatePrimitive(const Primitive& prim);

// One of the four printed scale variants of `kind`.
Primitive MakePrimitive(PrimitiveKind kind, int version);

// All 32 primitives, kind-major then version.
std::vector<Primitive> PrimitiveCatalog();

// Side of the square bounding the feature footprint in its local frame.
double FootprintSide(const Primitive& prim);

// Height of the indenter surface above its base plane at local point p;
// 0 outside the footprint.
double HeightField(const Primitive& prim, Vec2 p);

enum class ObjectName { kPliers, kClamp, kScissors, kAllenKey, kWrench };

inline constexpr std::array<ObjectName, 5> kAllObjects = {
    ObjectName::kPliers, ObjectName::kClamp, ObjectName::kScissors, ObjectName::kAllenKey,
    ObjectName::kWrench};

std::string_view ObjectNameString(ObjectName name);
ObjectName ObjectFromName(std::string_view name);

// Solid used to compose object shapes. Poses are in the object frame.
//   box      length x width footprint, flat top at `top`
//   capsule  rod of `radius` around a segment of `length`, apex at `top`
//   ring     annulus of outer `radius` and `width` thickness, flat top at `top`
struct ObjectPart {
  enum class Shape { kBox, kCapsule, kRing };
  Shape shape = Shape::kBox;
  Vec2 center;
  double angle = 0.0;
  double length = 0.0;
  double width = 0.0;
  double radius = 0.0;
  double top = 0.0;
};

struct ObjectShape {
  ObjectName name = ObjectName::kPliers;
  std::vector<ObjectPart> parts;
  std::array<Vec2, 4> keypoints{};
};

// Approximate tool silhouettes built from boxes, capsules and rings.
const ObjectShape& GetObject(ObjectName name);

// Upper envelope of all parts at object-frame point p.
double HeightField(const ObjectShape& object, Vec2 p);

// Object indenter anchored so `keypoint` sits at the local origin.
struct ObjectContact {
  ObjectName object = ObjectName::kPliers;
  int keypoint = 0;

  friend bool operator==(const ObjectContact&, const ObjectContact&) = default;
};

using Indenter = std::variant<Primitive, ObjectContact>;

// The indenter's local origin sits at `position` (sensor frame) after a
// rotation by `orientation` about the contact normal.
struct ContactScene {
  Indenter indenter;
  Vec2 position;
  double orientation = 0.0;
  double force = 8.0;

  friend bool operator==(const ContactScene&, const ContactScene&) = default;
};

// Throws InvalidArgument unless force > 0, orientation in [0, 2pi) and the
// indenter is valid.
void ValidateScene(const ContactScene& scene);

// Indenter height at a sensor-frame point.
double SceneHeight(const ContactScene& scene, Vec2 p_sensor);

// Winkler layer: pressure = stiffness * local compression.
struct ElasticLayer {
  double stiffness = 0.5;             // N/mm^3
  double thickness = 4.0;             // mm
  double saturation_raw = kFullScale;  // counts
  // Taxel gain: counts per newton integrated over the sensing disc. The
  // default puts the reference scene (8 N flat disc of 5 mm radius centered
  // on a taxel) at 70% of fullscale: 0.7 * 40000 / (8 N * 2.5^2 / 5^2).
  double counts_per_pressure = 14000.0;
};

void ValidateLayer(const ElasticLayer& layer);

// Grayscale camera-sensor response.
struct CameraModel {
  double depth_scale_mm = 0.3;  // response knee: I = 1 - exp(-depth / depth_scale)
  double blur_sigma_mm = 1.0;
};

// Additive zero-mean Gaussian noise with a per-sample seed.
struct SensorNoise {
  std::uint64_t seed = 0;
  double sigma = 0.0;
};

// Default noise levels: 0.2% of fullscale on the taxel array; intensity
// units on the camera image.
inline constexpr double kArrayNoiseSigma = 0.002 * kFullScale;
inline constexpr double kCameraNoiseSigma = 0.005;

struct ContactSolution {
  double penetration = 0.0;  // mm, measured from first contact
  TactileImage pressure;     // N/mm^2 on the simulation grid
};

// Penetration depth at which the integrated pressure over `grid` balances
// scene.force, by bisection on [0, layer.thickness]. Throws ForceUnreachable
// when even full-thickness compression cannot supply the force.
double SolvePenetration(const ContactScene& scene, const ElasticLayer& layer,
                        const PixelGrid& grid);

ContactSolution SolveContact(const ContactScene& scene, const ElasticLayer& layer,
                             const PixelGrid& grid);

TactileImage PressureField(const ContactScene& scene, const ElasticLayer& layer,
                           const PixelGrid& grid);

// Exact area of the intersection of a disc with an axis-aligned rectangle.
double DiscRectOverlap(Vec2 center, double radius, double x0, double x1, double y0, double y1);

// Per-taxel response: gain * integral of pressure over the sensing disc, plus
// optional noise, clamped to [0, saturation] and rounded to whole counts.
// Pixels are treated as constant-pressure rectangles. Throws GridMismatch if
// a sensing disc extends beyond the pressure grid.
ArraySample SenseArray(const TactileImage& pressure, const TaxelLayout& layout,
                       const ElasticLayer& layer, std::optional<SensorNoise> noise = std::nullopt);

// Normalized grayscale image in [0, 1]: compression depth through the
// response curve, Gaussian-blurred, plus optional noise. Background is 0.
TactileImage SenseCamera(const TactileImage& pressure, const ElasticLayer& layer,
                         const PixelGrid& camera_grid, const CameraModel& model = {},
                         std::optional<SensorNoise> noise = std::nullopt);

// Separable Gaussian blur with zero padding; sigma in pixels per axis.
TactileImage GaussianBlur(const TactileImage& image, double sigma_x_px, double sigma_y_px);

}  // namespace t2t

#endif  // T2T_CONTACT_HPP_
