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

#include "t2t/evaluate.hpp"

#include <optional>

#include "t2t/errors.hpp"
#include "t2t/interp.hpp"

namespace t2t {

EvalRow ScoreSample(const std::string& id, const std::string& split, const std::string& label,
                    const ArraySample& y, const SampleImages& images) {
  EvalRow row;
  row.id = id;
  row.split = split;
  row.model_kind = label;
  row.rmse = Rmse(y.values, images.y_hat.values);
  row.percent_fullscale = PercentFullScale(row.rmse);
  row.ssim = Ssim(images.phi_pred, images.truth, kTactileRange);
  row.contact_iou = ContactIou(images.phi_pred, images.truth);
  return row;
}

EvalReport Evaluate(std::span<const TranslatorModel> models, std::span<const PairedSample> samples,
                    std::span<const std::string> labels, const EvalVisitor& visit) {
  if (models.empty()) throw InvalidArgument("no models to evaluate");
  if (!labels.empty() && labels.size() != models.size()) {
    throw InvalidArgument("one label per model is required");
  }
  std::vector<Inference> runners;
  std::vector<std::string> names;
  for (std::size_t m = 0; m < models.size(); ++m) {
    runners.emplace_back(models[m]);
    names.emplace_back(labels.empty() ? std::string(ModelKindName(models[m].kind)) : labels[m]);
    if (models[m].layout != models.front().layout || models[m].output_grid != models.front().output_grid) {
      throw ShapeMismatch("models disagree on the taxel layout or tactile grid");
    }
  }
  const TranslatorModel& first = models.front();
  const PhiOperator phi(first.layout, first.output_grid);

  EvalReport report;
  report.per_sample.reserve(samples.size() * models.size());
  for (const PairedSample& s : samples) {
    if (s.y.size() != first.n_taxels() || (!s.y.layout_id.empty() && s.y.layout_id != first.layout.id())) {
      throw ShapeMismatch("sample " + s.id + " was recorded with a different taxel layout");
    }
    const TactileImage truth = phi.Apply(s.y);
    for (std::size_t m = 0; m < runners.size(); ++m) {
      ModelOutput out = runners[m].Forward(s.x);
      SampleImages images{truth, TactileImage(first.output_grid), TactileImage(first.output_grid), {}};
      if (auto* img = std::get_if<TactileImage>(&out)) {
        images.y_hat = PhiInv(*img, first.layout);
        images.phi_pred = phi.Apply(images.y_hat);
        images.generated = std::move(*img);
      } else {
        images.y_hat = std::get<ArraySample>(std::move(out));
        images.phi_pred = phi.Apply(images.y_hat);
        images.generated = images.phi_pred;
      }
      report.per_sample.push_back(ScoreSample(s.id, std::string(SplitName(s.split)), names[m], s.y, images));
      if (visit) visit(s, m, images);
    }
  }
  return report;
}

}  // namespace t2t
