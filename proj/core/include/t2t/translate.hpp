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

#ifndef T2T_TRANSLATE_HPP_
#define T2T_TRANSLATE_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "t2t/geometry.hpp"
#include "t2t/image.hpp"

namespace t2t {

enum class ModelKind : std::uint8_t { kImageSpace = 0, kArraySpace = 1, kLinearBaseline = 2 };

std::string_view ModelKindName(ModelKind kind);
// Throws InvalidArgument for unknown names.
ModelKind ModelKindFromName(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  // Per-epoch multiplicative step-size decay, in (0, 1].
  double lr_decay = 1.0;
  int batch_size = 8;
  int max_epochs = 40;
  int patience = 5;
  std::uint64_t seed = 0;
  int downsample = 4;
  // Weight of the pixelwise reconstruction term on the generated image
  // (image_space only).
  double recon_weight = 1.0;
  // Ridge penalty for the closed-form baseline.
  double ridge = 1.0;
  // Architecture widths; empty selects the kind's default.
  std::vector<int> channels;
};

// Defaults per kind: the generator uses batch 32; the regressor uses batch 8,
// step 3e-3 decayed by 0.93 per epoch, up to 60 epochs with patience 10.
TrainConfig DefaultTrainConfig(ModelKind kind);

// Throws InvalidArgument unless learning_rate > 0, batch_size >= 1,
// patience >= 1, max_epochs >= 1, downsample >= 1 and ridge >= 0.
void ValidateTrainConfig(const TrainConfig& cfg);

// Canonical JSON text of a config; its Hash64 is the model's config_hash.
std::string TrainConfigToJson(const TrainConfig& cfg);
TrainConfig TrainConfigFromJson(const std::string& text);

struct TrainingMeta {
  std::uint32_t epochs_run = 0;
  double best_val_l3 = 0.0;  // mean per-sample L3 on validation, counts^2
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;

  friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

using TensorShape = std::vector<std::uint32_t>;

// Sensor geometry a translator is built for.
struct ModelGeometry {
  PixelGrid input_grid;   // full-resolution camera image grid
  TaxelLayout layout;
  PixelGrid output_grid;  // tactile image grid
};

ModelGeometry DefaultModelGeometry();

// Architectures (widths in `arch`):
//   array_space     {c1, c2, c3, pool_rows, pool_cols}: three conv3x3 + SiLU +
//                   2x2 average-pool blocks, adaptive average pooling to
//                   pool_rows x pool_cols, dense head of size N.
//   image_space     {c1, c2, c3, c4}: four-level encoder-decoder with skip
//                   concatenations producing one channel on the downsampled
//                   input grid, bilinearly resized onto the tactile grid.
//   linear_baseline {}: Y = W vec(x) + b.
struct TranslatorModel {
  ModelKind kind = ModelKind::kArraySpace;
  PixelGrid input_grid;
  int downsample = 1;
  std::vector<std::uint32_t> arch;
  TaxelLayout layout = BuildDefaultLayout();
  PixelGrid output_grid;
  std::vector<TensorShape> tensors;
  std::vector<float> parameters;
  TrainingMeta meta;

  // Grid the network actually consumes.
  PixelGrid model_grid() const { return DownsampleGrid(input_grid, downsample); }
  std::size_t n_taxels() const { return layout.n_taxels(); }

  friend bool operator==(const TranslatorModel&, const TranslatorModel&) = default;
};

std::size_t TensorSize(const TensorShape& shape);

// Throws InvalidArgument if the descriptor does not match the architecture,
// the parameter count differs from the descriptor, or a parameter is not
// finite.
void ValidateModel(const TranslatorModel& model);

// Fresh network with parameters uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]
// drawn from cfg.seed. Throws NonDifferentiableKind for linear_baseline.
TranslatorModel InitModel(ModelKind kind, const ModelGeometry& geometry, const TrainConfig& cfg);

struct TrainingPair {
  TactileImage x;  // camera image, full resolution or already downsampled
  ArraySample y;   // raw counts
};

// Reduces x to the model grid: full-resolution inputs are downsampled,
// inputs already on the model grid pass through. Throws ShapeMismatch
// otherwise.
TactileImage PrepareInput(const TranslatorModel& model, const TactileImage& x);

// Sum of squared differences. Throws LengthMismatch.
double L3Loss(std::span<const float> y, std::span<const float> y_hat);
double L3Loss(const ArraySample& y, const ArraySample& y_hat);

// image_space: the generated tactile image on the output grid, in counts.
// Other kinds: the predicted array, clamped to [0, 40000].
using ModelOutput = std::variant<TactileImage, ArraySample>;
ModelOutput Forward(const TranslatorModel& model, const TactileImage& x);

// End-to-end array prediction: phi_inv(Forward(x)) for image_space,
// Forward(x) otherwise.
ArraySample Predict(const TranslatorModel& model, const TactileImage& x);

// Inference state for one model, built once and reused across inputs.
// Not safe for concurrent use.
class Inference {
 public:
  explicit Inference(TranslatorModel model);
  ~Inference();
  Inference(Inference&&) noexcept;
  Inference& operator=(Inference&&) noexcept;

  const TranslatorModel& model() const;
  ModelOutput Forward(const TactileImage& x);
  ArraySample Predict(const TactileImage& x);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct BackwardOptions {
  // Adds recon_weight * (N / P) * sum((I_hat - I)^2) over the P pixels of the
  // network's native output grid, with I = phi(y) sampled on that grid.
  double recon_weight = 0.0;
  // Per-tensor mask; gradients of frozen tensors are exactly zero.
  std::vector<bool> frozen;
};

// Gradient of the training loss with respect to the parameters. The loss is
// L3 on fullscale-normalized arrays, without output clamping; for
// image_space the prediction is phi_inv of the resized generator output.
// Throws NonDifferentiableKind for linear_baseline.
std::vector<float> Backward(const TranslatorModel& model, const TactileImage& x,
                            const ArraySample& y, const BackwardOptions& options = {});

// Double-precision evaluation of the same loss at arbitrary parameters;
// fills `grad` when it is non-empty.
double TrainingLoss(const TranslatorModel& model, std::span<const double> params,
                    const TactileImage& x, const ArraySample& y,
                    const BackwardOptions& options = {}, std::span<double> grad = {});

struct TrainLog {
  std::vector<double> train_loss;  // mean normalized loss per epoch
  std::vector<double> val_l3;      // mean raw-count L3 per epoch
  int best_epoch = 0;              // 1-based
};

// Minibatch Adam on the training loss with early stopping on validation L3.
// Returns the best-validation parameters. linear_baseline is fitted in
// closed form with cfg.ridge. Throws Diverged on a non-finite loss.
TranslatorModel Train(ModelKind kind, const TrainConfig& cfg, std::span<const TrainingPair> train,
                      std::span<const TrainingPair> val, const ModelGeometry& geometry,
                      TrainLog* log = nullptr);

// Centered design for the closed-form baseline; Solve() can be called for
// several ridge values without refactoring the data.
class LinearDesign {
 public:
  // Throws InvalidArgument with fewer pairs than taxels.
  LinearDesign(std::span<const TrainingPair> train, const ModelGeometry& geometry, int downsample);

  // Throws SingularSystem when ridge == 0 and the centered design is rank
  // deficient.
  TranslatorModel Solve(double ridge) const;
  // Mean diagonal of the Gram matrix, a natural scale for ridge values.
  double GramScale() const;

 private:
  ModelGeometry geometry_;
  int downsample_;
  Eigen::MatrixXd x_;  // centered inputs, one row per pair
  Eigen::MatrixXd y_;  // centered targets
  Eigen::VectorXd x_mean_;
  Eigen::VectorXd y_mean_;
  Eigen::MatrixXd gram_;  // x_^T x_
  Eigen::MatrixXd xty_;   // x_^T y_
};

TranslatorModel FitLinearBaseline(std::span<const TrainingPair> train, double ridge,
                                  const ModelGeometry& geometry, int downsample);

// Binary model file (T2TM). Round trips bit-exactly.
std::vector<std::uint8_t> SerializeModel(const TranslatorModel& model);
// Throws FormatError (with byte offset) on malformed input.
TranslatorModel DeserializeModel(std::span<const std::uint8_t> bytes);
void SaveModel(const TranslatorModel& model, const std::filesystem::path& path);
TranslatorModel LoadModel(const std::filesystem::path& path);

}  // namespace t2t

#endif  // T2T_TRANSLATE_HPP_
