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

#ifndef T2T_METRICS_HPP_
#define T2T_METRICS_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "t2t/image.hpp"

namespace t2t {

// Square root of the per-channel mean squared difference. Throws
// LengthMismatch for unequal lengths or empty inputs.
double Rmse(std::span<const float> y, std::span<const float> y_hat);

// 100 * rmse / 40000.
double PercentFullScale(double rmse_value);

// SSIM dynamic ranges for the two image families.
inline constexpr double kTactileRange = kFullScale;
inline constexpr double kCameraRange = 1.0;

// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5), averaged over
// all window positions that fit inside the image. Throws ShapeMismatch for
// unequal shapes or images smaller than the window.
double Ssim(const TactileImage& a, const TactileImage& b, double dynamic_range = kTactileRange);

inline constexpr double kDefaultIouThreshold = 0.25;

// Intersection over union of the masks {v >= t * max(image)}, one per image.
// Both masks empty gives 1, exactly one empty gives 0.
double ContactIou(const TactileImage& a, const TactileImage& b,
                  double threshold_fraction = kDefaultIouThreshold);

struct EvalRow {
  std::string id;
  std::string split;
  std::string model_kind;
  double rmse = 0.0;
  double percent_fullscale = 0.0;
  double ssim = 0.0;
  double contact_iou = 0.0;
};

struct EvalAggregate {
  std::string split;
  std::string model_kind;
  std::size_t count = 0;
  double rmse = 0.0;
  double percent_fullscale = 0.0;
  double ssim = 0.0;
  double contact_iou = 0.0;
};

// Per-sample table. Aggregates are arithmetic means of per-sample rows,
// grouped by (split, model kind) in order of first appearance.
struct EvalReport {
  std::vector<EvalRow> per_sample;

  std::vector<EvalAggregate> Aggregate() const;
  // JSON document with header, per_sample rows and aggregates.
  std::string ToJson() const;
  // Plain-text table: one block per split, one column per model kind.
  std::string Summary() const;
};

EvalReport ReportFromJson(const std::string& text);
void SaveReport(const EvalReport& report, const std::filesystem::path& path);

}  // namespace t2t

#endif  // T2T_METRICS_HPP_
