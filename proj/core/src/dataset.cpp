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

#include "t2t/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "binary_io.hpp"
#include "json.hpp"
#include "t2t/errors.hpp"
#include "t2t/hash.hpp"
#include "t2t/image_io.hpp"
#include "t2t/parallel.hpp"

namespace t2t {

namespace {

using json = nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::array<std::string_view, 2> kCorpusNames = {"primitives", "objects"};
constexpr std::array<std::string_view, 3> kSplitNames = {"train", "val", "test"};
constexpr std::string_view kManifestFormat = "t2t-corpus";
constexpr int kManifestVersion = 1;
constexpr std::string_view kTxlMagic = "TXL1";

constexpr const char* kSceneFile = "scene.json";
constexpr const char* kImageFile = "x.pfm";
constexpr const char* kArrayFile = "y.txl";

// Drops the "ErrorName: " prefix an Error adds to its message.
std::string Detail(const Error& e) {
  const std::string what = e.what();
  const auto colon = what.find(": ");
  return colon == std::string::npos ? what : what.substr(colon + 2);
}

template <typename E>
void RethrowIf(const Error& e, const std::string& context) {
  if (dynamic_cast<const E*>(&e) != nullptr) throw E(context + Detail(e));
}

[[noreturn]] void RethrowWithContext(const Error& e, const std::string& context) {
  RethrowIf<ForceUnreachable>(e, context);
  RethrowIf<GridMismatch>(e, context);
  RethrowIf<OutOfBounds>(e, context);
  RethrowIf<DegenerateInput>(e, context);
  RethrowIf<InvalidArgument>(e, context);
  throw;
}

template <typename T>
T Get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

json ParseJson(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + " is not valid JSON: " + e.what(), e.byte);
  }
}

json GridToJson(const PixelGrid& g) {
  return {{"rows", g.rows},
          {"cols", g.cols},
          {"origin_mm", {g.origin.x, g.origin.y}},
          {"spacing_mm", {g.spacing_x, g.spacing_y}}};
}

PixelGrid GridFromJson(const json& j) {
  PixelGrid g;
  g.rows = Get<int>(j, "rows");
  g.cols = Get<int>(j, "cols");
  const auto origin = Get<std::array<double, 2>>(j, "origin_mm");
  const auto spacing = Get<std::array<double, 2>>(j, "spacing_mm");
  g.origin = {origin[0], origin[1]};
  g.spacing_x = spacing[0];
  g.spacing_y = spacing[1];
  ValidateGrid(g);
  return g;
}

json SceneJson(const ContactScene& scene) {
  json ind;
  if (const auto* p = std::get_if<Primitive>(&scene.indenter)) {
    ind = {{"type", "primitive"},
           {"kind", std::string(KindName(p->kind))},
           {"version", p->version},
           {"a_mm", p->a},
           {"b_mm", p->b}};
  } else {
    const auto& o = std::get<ObjectContact>(scene.indenter);
    ind = {{"type", "object"}, {"object", std::string(ObjectNameString(o.object))}, {"keypoint", o.keypoint}};
  }
  return {{"indenter", ind},
          {"position_mm", {scene.position.x, scene.position.y}},
          {"orientation_rad", scene.orientation},
          {"force_n", scene.force}};
}

ContactScene SceneFromJsonValue(const json& j) {
  ContactScene s;
  const json& ind = j.at("indenter");
  const auto type = Get<std::string>(ind, "type");
  if (type == "primitive") {
    Primitive p;
    p.kind = KindFromName(Get<std::string>(ind, "kind"));
    p.version = Get<int>(ind, "version");
    p.a = Get<double>(ind, "a_mm");
    p.b = Get<double>(ind, "b_mm");
    s.indenter = p;
  } else if (type == "object") {
    s.indenter = ObjectContact{ObjectFromName(Get<std::string>(ind, "object")), Get<int>(ind, "keypoint")};
  } else {
    throw ConfigError("unknown indenter type '" + type + "'");
  }
  const auto pos = Get<std::array<double, 2>>(j, "position_mm");
  s.position = {pos[0], pos[1]};
  s.orientation = Get<double>(j, "orientation_rad");
  s.force = Get<double>(j, "force_n");
  ValidateScene(s);
  return s;
}

json ConfigJson(const DatasetConfig& cfg) {
  return {{"corpus", std::string(CorpusName(cfg.corpus))},
          {"grid_points_per_side", cfg.grid_points_per_side},
          {"grid_scale", cfg.grid_scale},
          {"grid_resolution_mm", cfg.grid_resolution_mm},
          {"orientations_rad", cfg.orientations},
          {"force_n", cfg.force},
          {"seed", cfg.seed},
          {"noise", cfg.noise},
          {"layout", json::parse(LayoutToJson(cfg.layout))},
          {"layer",
           {{"stiffness_n_per_mm3", cfg.layer.stiffness},
            {"thickness_mm", cfg.layer.thickness},
            {"saturation_raw", cfg.layer.saturation_raw},
            {"counts_per_pressure", cfg.layer.counts_per_pressure}}},
          {"camera", {{"depth_scale_mm", cfg.camera.depth_scale_mm}, {"blur_sigma_mm", cfg.camera.blur_sigma_mm}}}};
}

DatasetConfig ConfigFromJsonValue(const json& j) {
  if (!j.is_object()) throw ConfigError("dataset config must be a JSON object");
  const Corpus corpus = j.contains("corpus") ? CorpusFromName(Get<std::string>(j, "corpus")) : Corpus::kPrimitives;
  DatasetConfig cfg = DefaultDatasetConfig(corpus);
  auto opt = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = Get<std::decay_t<decltype(field)>>(j, key);
  };
  opt("grid_points_per_side", cfg.grid_points_per_side);
  opt("grid_scale", cfg.grid_scale);
  opt("grid_resolution_mm", cfg.grid_resolution_mm);
  opt("orientations_rad", cfg.orientations);
  opt("force_n", cfg.force);
  opt("seed", cfg.seed);
  opt("noise", cfg.noise);
  if (j.contains("layout")) cfg.layout = LayoutFromJson(j.at("layout").dump());
  if (j.contains("layer")) {
    const json& l = j.at("layer");
    auto lopt = [&l](const char* key, double& field) {
      if (l.contains(key)) field = Get<double>(l, key);
    };
    lopt("stiffness_n_per_mm3", cfg.layer.stiffness);
    lopt("thickness_mm", cfg.layer.thickness);
    lopt("saturation_raw", cfg.layer.saturation_raw);
    lopt("counts_per_pressure", cfg.layer.counts_per_pressure);
  }
  if (j.contains("camera")) {
    const json& c = j.at("camera");
    if (c.contains("depth_scale_mm")) cfg.camera.depth_scale_mm = Get<double>(c, "depth_scale_mm");
    if (c.contains("blur_sigma_mm")) cfg.camera.blur_sigma_mm = Get<double>(c, "blur_sigma_mm");
  }
  ValidateDatasetConfig(cfg);
  return cfg;
}

std::string GridId(int row, int col) { return "_r" + std::to_string(row) + "_c" + std::to_string(col); }

std::string OrientationId(std::size_t k) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "_o%02zu", k);
  return buf;
}

// Offset of grid point (row, col) on an n x n grid of spacing `res` centered
// on the sensor.
Vec2 GridPoint(int row, int col, int n, double res) {
  const double half = (n - 1) / 2.0;
  return {(col - half) * res, (row - half) * res};
}

struct SampleFiles {
  std::string scene;
  std::vector<std::uint8_t> image;
  std::vector<std::uint8_t> array;
};

SampleFiles EncodeSample(const PairedSample& s) {
  json j = {{"id", s.id},
            {"split", std::string(SplitName(s.split))},
            {"scene", SceneJson(s.scene)},
            {"noise", {{"enabled", s.noise}, {"camera_seed", s.camera_seed}, {"array_seed", s.array_seed}}},
            {"layout_id", s.y.layout_id},
            {"x_grid", GridToJson(s.x.grid())}};
  return {j.dump(2) + "\n", EncodePfm(s.x), EncodeTxl(s.y)};
}

PairedSample DecodeSample(const std::string& scene_text, std::span<const std::uint8_t> image,
                          std::span<const std::uint8_t> array) {
  const json j = ParseJson(scene_text, kSceneFile);
  PairedSample s;
  try {
    s.id = Get<std::string>(j, "id");
    s.split = SplitFromName(Get<std::string>(j, "split"));
    s.scene = SceneFromJsonValue(j.at("scene"));
    const json& noise = j.at("noise");
    s.noise = Get<bool>(noise, "enabled");
    s.camera_seed = Get<std::uint64_t>(noise, "camera_seed");
    s.array_seed = Get<std::uint64_t>(noise, "array_seed");
    s.x = DecodePfm(image, GridFromJson(j.at("x_grid")));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scene.json: ") + e.what());
  }
  s.y = DecodeTxl(array);
  s.y.layout_id = Get<std::string>(j, "layout_id");
  return s;
}

std::string ReadText(const std::filesystem::path& path) {
  const auto bytes = internal::ReadFileBytes(path);
  return std::string(bytes.begin(), bytes.end());
}

std::span<const std::uint8_t> AsBytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

std::string_view CorpusName(Corpus corpus) { return kCorpusNames.at(static_cast<std::size_t>(corpus)); }

Corpus CorpusFromName(std::string_view name) {
  for (std::size_t i = 0; i < kCorpusNames.size(); ++i) {
    if (kCorpusNames[i] == name) return static_cast<Corpus>(i);
  }
  throw InvalidArgument("unknown corpus '" + std::string(name) + "'");
}

std::string_view SplitName(Split split) { return kSplitNames.at(static_cast<std::size_t>(split)); }

Split SplitFromName(std::string_view name) {
  for (std::size_t i = 0; i < kSplitNames.size(); ++i) {
    if (kSplitNames[i] == name) return static_cast<Split>(i);
  }
  throw InvalidArgument("unknown split '" + std::string(name) + "'");
}

std::vector<double> EvenOrientations(int count) {
  if (count < 1) throw InvalidArgument("need at least one orientation");
  std::vector<double> out(count, 0.0);
  const double last = 7.0 * std::numbers::pi / 4.0;
  for (int k = 1; k < count; ++k) out[k] = last * k / (count - 1);
  return out;
}

DatasetConfig DefaultDatasetConfig(Corpus corpus) {
  DatasetConfig cfg;
  cfg.corpus = corpus;
  if (corpus == Corpus::kObjects) {
    cfg.grid_points_per_side = 3;
    cfg.orientations = EvenOrientations(7);
  }
  return cfg;
}

void ValidateDatasetConfig(const DatasetConfig& cfg) {
  if (cfg.grid_points_per_side < 1) throw InvalidArgument("grid_points_per_side must be >= 1");
  if (!(cfg.grid_scale > 0.0) || !std::isfinite(cfg.grid_scale)) throw InvalidArgument("grid_scale must be positive");
  if (!(cfg.grid_resolution_mm > 0.0) || !std::isfinite(cfg.grid_resolution_mm)) {
    throw InvalidArgument("grid_resolution_mm must be positive");
  }
  if (cfg.orientations.empty()) throw InvalidArgument("orientations must be non-empty");
  for (double o : cfg.orientations) {
    if (!(o >= 0.0 && o < kTwoPi)) throw InvalidArgument("orientations must lie in [0, 2pi)");
  }
  if (!(cfg.force > 0.0) || !std::isfinite(cfg.force)) throw InvalidArgument("force must be positive");
  ValidateLayer(cfg.layer);
  if (!(cfg.camera.depth_scale_mm > 0.0) || !(cfg.camera.blur_sigma_mm >= 0.0)) {
    throw InvalidArgument("camera model needs depth_scale_mm > 0 and blur_sigma_mm >= 0");
  }
}

std::string DatasetConfigToJson(const DatasetConfig& cfg) { return ConfigJson(cfg).dump(); }

DatasetConfig DatasetConfigFromJson(const std::string& text) {
  return ConfigFromJsonValue(ParseJson(text, "dataset config"));
}

std::vector<SampleSpec> EnumerateSamples(const DatasetConfig& cfg) {
  ValidateDatasetConfig(cfg);
  const int n = cfg.grid_points_per_side;
  std::vector<SampleSpec> out;
  auto emit = [&](const std::string& prefix, const Indenter& indenter, double res, Split split) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        for (std::size_t k = 0; k < cfg.orientations.size(); ++k) {
          SampleSpec s;
          s.id = prefix + GridId(r, c) + OrientationId(k);
          s.scene = ContactScene{indenter, GridPoint(r, c, n, res), cfg.orientations[k], cfg.force};
          s.split = split;
          const std::uint64_t index = out.size();
          s.camera_seed = DeriveSeed(cfg.seed, 2 * index);
          s.array_seed = DeriveSeed(cfg.seed, 2 * index + 1);
          out.push_back(std::move(s));
        }
      }
    }
  };
  if (cfg.corpus == Corpus::kPrimitives) {
    for (const Primitive& p : PrimitiveCatalog()) {
      const std::string prefix = std::string(KindName(p.kind)) + "_v" + std::to_string(p.version);
      emit(prefix, p, cfg.grid_scale * FootprintSide(p), p.version == kVersionsPerKind ? Split::kVal : Split::kTrain);
    }
  } else {
    for (ObjectName o : kAllObjects) {
      for (int k = 0; k < 4; ++k) {
        const std::string prefix = std::string(ObjectNameString(o)) + "_k" + std::to_string(k);
        emit(prefix, ObjectContact{o, k}, cfg.grid_resolution_mm, Split::kTest);
      }
    }
  }
  return out;
}

PixelGrid CameraGrid(const TaxelLayout& layout) { return FitCameraGrid(FitTactileGrid(layout)); }

PairedSample SimulateSample(const SampleSpec& spec, const DatasetConfig& cfg) {
  const PixelGrid grid = CameraGrid(cfg.layout);
  PairedSample s;
  s.id = spec.id;
  s.scene = spec.scene;
  s.split = spec.split;
  s.camera_seed = spec.camera_seed;
  s.array_seed = spec.array_seed;
  s.noise = cfg.noise;
  try {
    const TactileImage pressure = PressureField(spec.scene, cfg.layer, grid);
    std::optional<SensorNoise> camera_noise, array_noise;
    if (cfg.noise) {
      camera_noise = SensorNoise{spec.camera_seed, kCameraNoiseSigma};
      array_noise = SensorNoise{spec.array_seed, kArrayNoiseSigma};
    }
    s.x = SenseCamera(pressure, cfg.layer, grid, cfg.camera, camera_noise);
    s.y = SenseArray(pressure, cfg.layout, cfg.layer, array_noise);
  } catch (const Error& e) {
    RethrowWithContext(e, "sample " + spec.id + ": ");
  }
  return s;
}

std::vector<PairedSample> SimulateCorpus(const DatasetConfig& cfg,
                                         const std::function<TactileImage(const TactileImage&)>& transform) {
  const std::vector<SampleSpec> specs = EnumerateSamples(cfg);
  std::vector<PairedSample> out(specs.size());
  ParallelFor(specs.size(), [&](std::size_t i) {
    out[i] = SimulateSample(specs[i], cfg);
    if (transform) out[i].x = transform(out[i].x);
  });
  return out;
}

VersionSplit SplitByVersion(std::span<const ContactScene> scenes) {
  std::array<std::array<bool, kVersionsPerKind>, kAllPrimitiveKinds.size()> seen{};
  VersionSplit split;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto* p = std::get_if<Primitive>(&scenes[i].indenter);
    if (p == nullptr) throw InvalidArgument("version split applies to primitive scenes only");
    if (p->version < 1 || p->version > kVersionsPerKind) {
      throw InvalidArgument("feature version " + std::to_string(p->version) + " outside 1..4");
    }
    seen[static_cast<std::size_t>(p->kind)][p->version - 1] = true;
    (p->version == kVersionsPerKind ? split.val : split.train).push_back(i);
  }
  for (PrimitiveKind kind : kAllPrimitiveKinds) {
    for (int v = 1; v <= kVersionsPerKind; ++v) {
      if (!seen[static_cast<std::size_t>(kind)][v - 1]) {
        throw MissingVersion(std::string(KindName(kind)) + " has no version " + std::to_string(v));
      }
    }
  }
  return split;
}

VersionSplit SplitByVersion(std::span<const PairedSample> samples) {
  std::vector<ContactScene> scenes;
  scenes.reserve(samples.size());
  for (const PairedSample& s : samples) scenes.push_back(s.scene);
  return SplitByVersion(scenes);
}

std::vector<std::uint8_t> EncodeTxl(const ArraySample& y) {
  internal::ByteWriter w;
  w.PutBytes(kTxlMagic);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(y.values.size()));
  w.PutArray<float>(y.values);
  w.Put<std::uint32_t>(Crc32(w.bytes()));
  return std::move(w.bytes());
}

ArraySample DecodeTxl(std::span<const std::uint8_t> bytes) {
  internal::ByteReader r(bytes, "txl");
  r.Expect(kTxlMagic);
  const auto n = r.Get<std::uint32_t>();
  if (static_cast<std::uint64_t>(n) * 4 + 4 > r.remaining()) r.Fail("count " + std::to_string(n) + " exceeds the file size");
  ArraySample y;
  y.values.resize(n);
  r.GetArray<float>(y.values);
  const std::size_t payload = r.pos();
  const auto crc = r.Get<std::uint32_t>();
  r.ExpectEnd();
  if (crc != Crc32(bytes.first(payload))) throw ChecksumMismatch("txl payload does not match its CRC-32");
  return y;
}

std::string SceneToJson(const ContactScene& scene) { return SceneJson(scene).dump(); }

ContactScene SceneFromJson(const std::string& text) {
  const json j = ParseJson(text, "scene");
  try {
    return SceneFromJsonValue(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed scene: ") + e.what());
  }
}

void SaveSample(const PairedSample& sample, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const SampleFiles f = EncodeSample(sample);
  internal::WriteFileBytes(dir / kSceneFile, AsBytes(f.scene));
  internal::WriteFileBytes(dir / kImageFile, f.image);
  internal::WriteFileBytes(dir / kArrayFile, f.array);
}

PairedSample LoadSample(const std::filesystem::path& dir) {
  return DecodeSample(ReadText(dir / kSceneFile), internal::ReadFileBytes(dir / kImageFile),
                      internal::ReadFileBytes(dir / kArrayFile));
}

std::size_t Manifest::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [split](const ManifestEntry& e) { return e.split == split; }));
}

std::string ManifestToJson(const Manifest& m) {
  json samples = json::array();
  for (const ManifestEntry& e : m.samples) {
    samples.push_back({{"id", e.id}, {"split", std::string(SplitName(e.split))}, {"path", e.path}, {"sha256", e.sha256}});
  }
  json j = {{"format", std::string(kManifestFormat)},
            {"version", kManifestVersion},
            {"config", ConfigJson(m.config)},
            {"counts",
             {{"total", m.samples.size()},
              {"train", m.count(Split::kTrain)},
              {"val", m.count(Split::kVal)},
              {"test", m.count(Split::kTest)}}},
            {"samples", std::move(samples)}};
  return j.dump(1) + "\n";
}

Manifest ManifestFromJson(const std::string& text) {
  const json j = ParseJson(text, "manifest");
  Manifest m;
  try {
    if (Get<std::string>(j, "format") != kManifestFormat) throw ConfigError("not a corpus manifest");
    if (Get<int>(j, "version") != kManifestVersion) throw ConfigError("unsupported manifest version");
    m.config = ConfigFromJsonValue(j.at("config"));
    for (const json& e : j.at("samples")) {
      ManifestEntry entry;
      entry.id = Get<std::string>(e, "id");
      entry.split = SplitFromName(Get<std::string>(e, "split"));
      entry.path = Get<std::string>(e, "path");
      entry.sha256 = Get<std::map<std::string, std::string>>(e, "sha256");
      m.samples.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Manifest LoadManifest(const std::filesystem::path& corpus_dir) {
  return ManifestFromJson(ReadText(corpus_dir / "manifest.json"));
}

Manifest GenerateCorpus(const DatasetConfig& cfg, const std::filesystem::path& out_dir) {
  const std::vector<SampleSpec> specs = EnumerateSamples(cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "samples", ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  Manifest m;
  m.config = cfg;
  m.samples.resize(specs.size());
  ParallelFor(specs.size(), [&](std::size_t i) {
    const PairedSample s = SimulateSample(specs[i], cfg);
    const SampleFiles f = EncodeSample(s);
    ManifestEntry& e = m.samples[i];
    e.id = s.id;
    e.split = s.split;
    e.path = "samples/" + s.id;
    const std::filesystem::path dir = out_dir / e.path;
    std::error_code dir_ec;
    std::filesystem::create_directories(dir, dir_ec);
    if (dir_ec) throw IoError("cannot create " + dir.string() + ": " + dir_ec.message());
    internal::WriteFileBytes(dir / kSceneFile, AsBytes(f.scene));
    internal::WriteFileBytes(dir / kImageFile, f.image);
    internal::WriteFileBytes(dir / kArrayFile, f.array);
    e.sha256 = {{kSceneFile, Sha256Hex(f.scene)}, {kImageFile, Sha256Hex(f.image)}, {kArrayFile, Sha256Hex(f.array)}};
  });
  const std::string manifest = ManifestToJson(m);
  internal::WriteFileBytes(out_dir / "manifest.json", AsBytes(manifest));
  return m;
}

std::vector<PairedSample> LoadCorpus(const std::filesystem::path& corpus_dir, const LoadOptions& options) {
  if (options.downsample < 1) throw InvalidArgument("downsample must be >= 1");
  const Manifest m = LoadManifest(corpus_dir);
  std::vector<const ManifestEntry*> entries;
  for (const ManifestEntry& e : m.samples) {
    if (!options.split || e.split == *options.split) entries.push_back(&e);
  }
  std::vector<PairedSample> out(entries.size());
  ParallelFor(entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = *entries[i];
    const std::filesystem::path dir = corpus_dir / e.path;
    const std::string scene = ReadText(dir / kSceneFile);
    const auto image = internal::ReadFileBytes(dir / kImageFile);
    const auto array = internal::ReadFileBytes(dir / kArrayFile);
    if (options.verify_hashes) {
      auto check = [&](const char* name, const std::string& actual) {
        const auto it = e.sha256.find(name);
        if (it == e.sha256.end() || it->second != actual) {
          throw ChecksumMismatch(e.path + "/" + name + " does not match the manifest hash");
        }
      };
      check(kSceneFile, Sha256Hex(scene));
      check(kImageFile, Sha256Hex(image));
      check(kArrayFile, Sha256Hex(array));
    }
    PairedSample s = DecodeSample(scene, image, array);
    if (options.downsample > 1) s.x = Downsample(s.x, options.downsample);
    out[i] = std::move(s);
  });
  return out;
}

}  // namespace t2t
