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

#ifndef T2T_EVALUATE_HPP_
#define T2T_EVALUATE_HPP_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "t2t/dataset.hpp"
#include "t2t/metrics.hpp"
#include "t2t/translate.hpp"

namespace t2t {

// Tactile images of one sample and one model.
struct SampleImages {
  TactileImage truth;      // phi(y)
  TactileImage generated;  // generator output for image_space, phi(y_hat) otherwise
  TactileImage phi_pred;   // phi(y_hat)
  ArraySample y_hat;
};

// Scores one prediction. RMSE uses y / y_hat; SSIM and contact IoU compare
// phi(y_hat) against phi(y), so every model kind is judged on the same image.
EvalRow ScoreSample(const std::string& id, const std::string& split, const std::string& label,
                    const ArraySample& y, const SampleImages& images);

// Called once per (sample, model) pair, in sample-major order.
using EvalVisitor =
    std::function<void(const PairedSample& sample, std::size_t model_index, const SampleImages& images)>;

// Rows in sample-major order, one per model. `labels` name the models in the
// report (kind names when empty). Throws ShapeMismatch when a model's layout
// or input grid does not match the samples.
EvalReport Evaluate(std::span<const TranslatorModel> models, std::span<const PairedSample> samples,
                    std::span<const std::string> labels = {}, const EvalVisitor& visit = {});

}  // namespace t2t

#endif  // T2T_EVALUATE_HPP_
