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

#ifndef T2T_DATASET_HPP_
#define T2T_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "t2t/contact.hpp"
#include "t2t/geometry.hpp"
#include "t2t/image.hpp"

namespace t2t {

enum class Corpus { kPrimitives, kObjects };
enum class Split { kTrain, kVal, kTest };

std::string_view CorpusName(Corpus corpus);
Corpus CorpusFromName(std::string_view name);  // throws InvalidArgument
std::string_view SplitName(Split split);
Split SplitFromName(std::string_view name);  // throws InvalidArgument

// `count` orientations equally spaced on [0, 7pi/4]; a single orientation is 0.
std::vector<double> EvenOrientations(int count);

struct DatasetConfig {
  Corpus corpus = Corpus::kPrimitives;
  int grid_points_per_side = 7;
  // Primitive grid resolution is grid_scale * footprint side; the default
  // 1.1 / 6 makes the 7x7 grid span 1.1 footprints.
  double grid_scale = 1.1 / 6.0;
  // Object grid resolution in mm.
  double grid_resolution_mm = 1.5;
  std::vector<double> orientations = EvenOrientations(12);
  double force = 8.0;
  std::uint64_t seed = 0;
  bool noise = true;
  TaxelLayout layout = BuildDefaultLayout();
  ElasticLayer layer;
  CameraModel camera;
};

// 7x7 grid, 12 orientations for primitives; 3x3 grid at 1.5 mm, 7 orientations
// for objects.
DatasetConfig DefaultDatasetConfig(Corpus corpus);

// Throws InvalidArgument unless orientations are non-empty and in [0, 2pi),
// grid_points_per_side >= 1, resolutions and force are positive, and the
// layer is valid.
void ValidateDatasetConfig(const DatasetConfig& cfg);

std::string DatasetConfigToJson(const DatasetConfig& cfg);
// Missing keys take the corpus defaults. Throws FormatError / ConfigError.
DatasetConfig DatasetConfigFromJson(const std::string& text);

// One scene of a corpus before simulation.
struct SampleSpec {
  std::string id;
  ContactScene scene;
  Split split = Split::kTrain;
  std::uint64_t camera_seed = 0;
  std::uint64_t array_seed = 0;

  friend bool operator==(const SampleSpec&, const SampleSpec&) = default;
};

// Scenes in canonical order: primitives kind-major, then version, grid row,
// grid column, orientation; objects by object, keypoint, grid row, column,
// orientation. Noise seeds derive from (cfg.seed, index).
std::vector<SampleSpec> EnumerateSamples(const DatasetConfig& cfg);

struct PairedSample {
  std::string id;
  ContactScene scene;
  TactileImage x;  // camera image
  ArraySample y;   // taxel counts
  Split split = Split::kTrain;
  std::uint64_t camera_seed = 0;
  std::uint64_t array_seed = 0;
  bool noise = false;

  friend bool operator==(const PairedSample&, const PairedSample&) = default;
};

// Camera grid the corpus images live on.
PixelGrid CameraGrid(const TaxelLayout& layout);

// Simulates one pair from a shared pressure field. Contact errors are
// rethrown with the sample id in the message.
PairedSample SimulateSample(const SampleSpec& spec, const DatasetConfig& cfg);

// In-memory corpus; `transform` (if set) is applied to each x, e.g. to
// downsample before storing.
std::vector<PairedSample> SimulateCorpus(
    const DatasetConfig& cfg,
    const std::function<TactileImage(const TactileImage&)>& transform = {});

struct VersionSplit {
  std::vector<std::size_t> train;  // versions 1..3
  std::vector<std::size_t> val;    // version 4
};

// Indices of a primitive corpus split by feature version. Throws
// MissingVersion if some kind lacks one of its four versions, and
// InvalidArgument for object scenes.
VersionSplit SplitByVersion(std::span<const ContactScene> scenes);
VersionSplit SplitByVersion(std::span<const PairedSample> samples);

// Sample directory: x.pfm, y.txl, scene.json.
void SaveSample(const PairedSample& sample, const std::filesystem::path& dir);
PairedSample LoadSample(const std::filesystem::path& dir);

// TXL1 array file: magic, u32 count, count f32 values, u32 CRC-32 of all
// preceding bytes.
std::vector<std::uint8_t> EncodeTxl(const ArraySample& y);
// Throws FormatError with the byte offset, ChecksumMismatch on a bad CRC.
ArraySample DecodeTxl(std::span<const std::uint8_t> bytes);

std::string SceneToJson(const ContactScene& scene);
ContactScene SceneFromJson(const std::string& text);

struct ManifestEntry {
  std::string id;
  Split split = Split::kTrain;
  std::string path;                           // relative to the corpus directory
  std::map<std::string, std::string> sha256;  // file name -> hex digest
};

struct Manifest {
  DatasetConfig config;
  std::vector<ManifestEntry> samples;
  std::size_t count(Split split) const;
};

// Writes every sample, then manifest.json with content hashes. Returns the
// manifest. Generation runs on ParallelFor workers; output bytes do not depend
// on the worker count.
Manifest GenerateCorpus(const DatasetConfig& cfg, const std::filesystem::path& out_dir);

std::string ManifestToJson(const Manifest& manifest);
Manifest ManifestFromJson(const std::string& text);
Manifest LoadManifest(const std::filesystem::path& corpus_dir);

struct LoadOptions {
  std::optional<Split> split;  // only samples of this split
  int downsample = 1;          // applied to x on load
  bool verify_hashes = true;   // ChecksumMismatch on any difference
};

std::vector<PairedSample> LoadCorpus(const std::filesystem::path& corpus_dir,
                                     const LoadOptions& options = {});

}  // namespace t2t

#endif  // T2T_DATASET_HPP_
