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

#include "t2t/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "t2t/errors.hpp"

namespace t2t {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;

std::array<double, kWindow> WindowWeights() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    w[i] = std::exp(-0.5 * d * d / (kWindowSigma * kWindowSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Valid-mode separable filter of a row-major rows x cols field.
std::vector<double> FilterValid(const std::vector<double>& in, int rows, int cols) {
  static const std::array<double, kWindow> w = WindowWeights();
  const int out_cols = cols - kWindow + 1, out_rows = rows - kWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(rows) * out_cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < out_cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += w[k] * in[static_cast<std::size_t>(r) * cols + c + k];
      tmp[static_cast<std::size_t>(r) * out_cols + c] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(out_rows) * out_cols);
  for (int r = 0; r < out_rows; ++r) {
    for (int c = 0; c < out_cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k) acc += w[k] * tmp[static_cast<std::size_t>(r + k) * out_cols + c];
      out[static_cast<std::size_t>(r) * out_cols + c] = acc;
    }
  }
  return out;
}

void CheckSameShape(const TactileImage& a, const TactileImage& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch("images are " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        " and " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

std::vector<char> Mask(const TactileImage& image, double fraction) {
  const double peak = image.MaxValue();
  std::vector<char> mask(image.size(), 0);
  if (!(peak > 0.0)) return mask;
  const double thr = fraction * peak;
  const auto d = image.data();
  for (std::size_t i = 0; i < d.size(); ++i) mask[i] = d[i] >= thr;
  return mask;
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

double Rmse(std::span<const float> y, std::span<const float> y_hat) {
  if (y.size() != y_hat.size() || y.empty()) {
    throw LengthMismatch("rmse of arrays of length " + std::to_string(y.size()) + " and " +
                         std::to_string(y_hat.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = static_cast<double>(y[i]) - y_hat[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(y.size()));
}

double PercentFullScale(double rmse_value) { return 100.0 * rmse_value / kFullScale; }

double Ssim(const TactileImage& a, const TactileImage& b, double dynamic_range) {
  CheckSameShape(a, b);
  if (a.rows() < kWindow || a.cols() < kWindow) {
    throw ShapeMismatch("ssim needs images of at least 11x11 pixels");
  }
  if (!(dynamic_range > 0.0)) throw InvalidArgument("ssim dynamic range must be positive");
  const int rows = a.rows(), cols = a.cols();
  const std::size_t n = a.size();
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  const auto da = a.data(), db = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = da[i];
    y[i] = db[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = FilterValid(x, rows, cols), my = FilterValid(y, rows, cols);
  const auto sxx = FilterValid(xx, rows, cols), syy = FilterValid(yy, rows, cols),
             sxy = FilterValid(xy, rows, cols);
  const double c1 = std::pow(0.01 * dynamic_range, 2), c2 = std::pow(0.03 * dynamic_range, 2);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    total += ((2 * mx[i] * my[i] + c1) * (2 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

double ContactIou(const TactileImage& a, const TactileImage& b, double threshold_fraction) {
  CheckSameShape(a, b);
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw InvalidArgument("iou threshold fraction must lie in (0, 1)");
  }
  const auto ma = Mask(a, threshold_fraction), mb = Mask(b, threshold_fraction);
  std::size_t inter = 0, uni = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    inter += ma[i] && mb[i];
    uni += ma[i] || mb[i];
    na += ma[i];
    nb += mb[i];
  }
  if (na == 0 && nb == 0) return 1.0;
  if (na == 0 || nb == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<EvalAggregate> EvalReport::Aggregate() const {
  std::vector<EvalAggregate> out;
  for (const EvalRow& row : per_sample) {
    auto it = std::find_if(out.begin(), out.end(), [&](const EvalAggregate& a) {
      return a.split == row.split && a.model_kind == row.model_kind;
    });
    if (it == out.end()) {
      out.push_back({row.split, row.model_kind});
      it = out.end() - 1;
    }
    ++it->count;
    it->rmse += row.rmse;
    it->percent_fullscale += row.percent_fullscale;
    it->ssim += row.ssim;
    it->contact_iou += row.contact_iou;
  }
  for (EvalAggregate& a : out) {
    const double n = static_cast<double>(a.count);
    a.rmse /= n;
    a.percent_fullscale /= n;
    a.ssim /= n;
    a.contact_iou /= n;
  }
  return out;
}

std::string EvalReport::ToJson() const {
  nlohmann::ordered_json doc;
  doc["header"] = {
      {"format", "t2t-eval-report"},
      {"version", 1},
      {"aggregation", "arithmetic mean of per-sample rmse over each (split, model_kind) group"},
      {"fullscale", kFullScale},
      {"ssim_window", {{"size", kWindow}, {"sigma", kWindowSigma}}},
  };
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const EvalRow& r : per_sample) {
    rows.push_back({{"id", r.id},
                    {"split", r.split},
                    {"model_kind", r.model_kind},
                    {"rmse", r.rmse},
                    {"percent_fullscale", r.percent_fullscale},
                    {"ssim", r.ssim},
                    {"contact_iou", r.contact_iou}});
  }
  doc["per_sample"] = std::move(rows);
  nlohmann::ordered_json agg = nlohmann::ordered_json::array();
  for (const EvalAggregate& a : Aggregate()) {
    agg.push_back({{"split", a.split},
                   {"model_kind", a.model_kind},
                   {"count", a.count},
                   {"rmse", a.rmse},
                   {"percent_fullscale", a.percent_fullscale},
                   {"ssim", a.ssim},
                   {"contact_iou", a.contact_iou}});
  }
  doc["aggregate"] = std::move(agg);
  return doc.dump(2) + "\n";
}

std::string EvalReport::Summary() const {
  const auto agg = Aggregate();
  std::vector<std::string> splits, kinds;
  for (const EvalAggregate& a : agg) {
    if (std::find(splits.begin(), splits.end(), a.split) == splits.end()) splits.push_back(a.split);
    if (std::find(kinds.begin(), kinds.end(), a.model_kind) == kinds.end()) {
      kinds.push_back(a.model_kind);
    }
  }
  auto lookup = [&](const std::string& s, const std::string& k) -> const EvalAggregate* {
    for (const EvalAggregate& a : agg) {
      if (a.split == s && a.model_kind == k) return &a;
    }
    return nullptr;
  };
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-12s %-14s", "split", "metric");
  out << buf;
  for (const auto& k : kinds) {
    std::snprintf(buf, sizeof(buf), " %14s", k.c_str());
    out << buf;
  }
  out << "\n";
  const std::array<std::pair<const char*, int>, 4> metrics = {
      {{"rmse", 0}, {"rmse (%)", 2}, {"ssim", 3}, {"contact_iou", 3}}};
  for (const auto& s : splits) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      std::snprintf(buf, sizeof(buf), "%-12s %-14s", m == 0 ? s.c_str() : "", metrics[m].first);
      out << buf;
      for (const auto& k : kinds) {
        const EvalAggregate* a = lookup(s, k);
        std::string cell = "-";
        if (a) {
          const double v = m == 0 ? a->rmse : m == 1 ? a->percent_fullscale : m == 2 ? a->ssim
                                                                                    : a->contact_iou;
          cell = Fixed(v, metrics[m].second);
        }
        std::snprintf(buf, sizeof(buf), " %14s", cell.c_str());
        out << buf;
      }
      out << "\n";
    }
  }
  return out.str();
}

EvalReport ReportFromJson(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid report json: ") + e.what(), e.byte);
  }
  EvalReport report;
  try {
    for (const auto& r : doc.at("per_sample")) {
      report.per_sample.push_back({r.at("id").get<std::string>(), r.at("split").get<std::string>(),
                                   r.at("model_kind").get<std::string>(), r.at("rmse").get<double>(),
                                   r.at("percent_fullscale").get<double>(),
                                   r.at("ssim").get<double>(), r.at("contact_iou").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  return report;
}

void SaveReport(const EvalReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << report.ToJson();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace t2t
