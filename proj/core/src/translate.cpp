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

#include "t2t/translate.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>

#include "json.hpp"
#include "binary_io.hpp"
#include "t2t/errors.hpp"
#include "t2t/hash.hpp"
#include "t2t/interp.hpp"
#include "t2t/nn.hpp"

namespace t2t {

namespace {

using nn::AlignedVector;
using nn::Shape3;

constexpr std::array<std::string_view, 3> kKindNames = {"image_space", "array_space",
                                                        "linear_baseline"};

std::vector<std::uint32_t> DefaultArch(ModelKind kind) {
  switch (kind) {
    case ModelKind::kImageSpace:
      return {4, 8, 16, 16};
    case ModelKind::kArraySpace:
      return {16, 32, 32, 10, 8};
    case ModelKind::kLinearBaseline:
      return {};
  }
  return {};
}

std::vector<std::uint32_t> ResolveArch(ModelKind kind, const std::vector<int>& channels) {
  if (channels.empty()) return DefaultArch(kind);
  std::vector<std::uint32_t> arch;
  for (int c : channels) {
    if (c < 1) throw InvalidArgument("architecture widths must be positive");
    arch.push_back(static_cast<std::uint32_t>(c));
  }
  return arch;
}

std::vector<TensorShape> ArchTensors(ModelKind kind, const std::vector<std::uint32_t>& arch,
                                     const PixelGrid& model_grid, std::uint32_t n_taxels) {
  std::vector<TensorShape> t;
  auto conv = [&t](std::uint32_t co, std::uint32_t ci) {
    t.push_back({co, ci, 3, 3});
    t.push_back({co});
  };
  switch (kind) {
    case ModelKind::kArraySpace: {
      if (arch.size() != 5) throw InvalidArgument("array_space needs 5 architecture values");
      conv(arch[0], 1);
      conv(arch[1], arch[0]);
      conv(arch[2], arch[1]);
      t.push_back({n_taxels, arch[2] * arch[3] * arch[4]});
      t.push_back({n_taxels});
      break;
    }
    case ModelKind::kImageSpace: {
      if (arch.size() != 4) throw InvalidArgument("image_space needs 4 architecture values");
      const auto c1 = arch[0], c2 = arch[1], c3 = arch[2], c4 = arch[3];
      conv(c1, 1);
      conv(c2, c1);
      conv(c3, c2);
      conv(c4, c3);
      conv(c3, c4 + c3);
      conv(c2, c3 + c2);
      conv(c1, c2 + c1);
      conv(1, c1);
      break;
    }
    case ModelKind::kLinearBaseline: {
      if (!arch.empty()) throw InvalidArgument("linear_baseline takes no architecture values");
      t.push_back({n_taxels, static_cast<std::uint32_t>(model_grid.size())});
      t.push_back({n_taxels});
      break;
    }
  }
  return t;
}

std::vector<std::size_t> Offsets(const std::vector<TensorShape>& tensors) {
  std::vector<std::size_t> off(tensors.size() + 1, 0);
  for (std::size_t i = 0; i < tensors.size(); ++i) off[i + 1] = off[i] + TensorSize(tensors[i]);
  return off;
}

// Bilinear taps of point p on `grid`, clamped to the outermost pixel centers.
struct Tap {
  std::size_t index;
  double weight;
};

std::array<Tap, 4> EdgeClampedTaps(const PixelGrid& grid, Vec2 p) {
  Vec2 uv = grid.ToPixel(p);
  uv.x = std::clamp(uv.x, 0.0, static_cast<double>(grid.cols - 1));
  uv.y = std::clamp(uv.y, 0.0, static_cast<double>(grid.rows - 1));
  const int c0 = std::clamp(static_cast<int>(std::floor(uv.x)), 0, std::max(0, grid.cols - 2));
  const int r0 = std::clamp(static_cast<int>(std::floor(uv.y)), 0, std::max(0, grid.rows - 2));
  const int c1 = std::min(c0 + 1, grid.cols - 1);
  const int r1 = std::min(r0 + 1, grid.rows - 1);
  const double fx = std::clamp(uv.x - c0, 0.0, 1.0);
  const double fy = std::clamp(uv.y - r0, 0.0, 1.0);
  auto idx = [&](int r, int c) { return static_cast<std::size_t>(r) * grid.cols + c; };
  return {{{idx(r0, c0), (1 - fx) * (1 - fy)},
           {idx(r0, c1), fx * (1 - fy)},
           {idx(r1, c0), (1 - fx) * fy},
           {idx(r1, c1), fx * fy}}};
}

// Generator output on its native grid resized onto the tactile grid, and the
// composed taxel read-out phi_inv o resize as sparse rows over native pixels.
struct ImageHead {
  PixelGrid native;
  PixelGrid output;
  std::vector<std::array<Tap, 4>> resize;
  std::vector<std::vector<Tap>> taxel_rows;

  ImageHead(const PixelGrid& native_grid, const PixelGrid& output_grid, const TaxelLayout& layout)
      : native(native_grid), output(output_grid) {
    resize.reserve(output.size());
    for (int r = 0; r < output.rows; ++r) {
      for (int c = 0; c < output.cols; ++c) {
        resize.push_back(EdgeClampedTaps(native, output.PixelCenter(r, c)));
      }
    }
    for (const BilinearStencil& s : TaxelStencils(layout, output)) {
      std::map<std::size_t, double> row;
      for (int k = 0; k < 4; ++k) {
        if (s.weight[k] == 0.0) continue;
        for (const Tap& tap : resize[s.index[k]]) row[tap.index] += s.weight[k] * tap.weight;
      }
      std::vector<Tap> taps;
      for (const auto& [index, w] : row) {
        if (w != 0.0) taps.push_back({index, w});
      }
      taxel_rows.push_back(std::move(taps));
    }
  }

  TactileImage Render(std::span<const float> native_out) const {
    TactileImage out(output);
    std::span<float> d = out.data();
    for (std::size_t p = 0; p < resize.size(); ++p) {
      double v = 0.0;
      for (const Tap& t : resize[p]) v += t.weight * native_out[t.index];
      d[p] = static_cast<float>(kFullScale * v);
    }
    return out;
  }
};

// Convolution followed by an optional SiLU; keeps its tape for backward.
template <typename T>
struct ConvLayer {
  Shape3 in;
  int co = 0;
  bool act = true;
  std::size_t w_off = 0, b_off = 0;
  AlignedVector<T> z, a, cols, dz, dcols;

  Shape3 out() const { return {co, in.h, in.w}; }

  const T* Forward(const T* params, const T* x) {
    const std::size_t n = out().size();
    z.resize(n);
    nn::Conv3x3Forward(x, in, params + w_off, params + b_off, co, z.data(), cols);
    if (!act) return z.data();
    a.resize(n);
    nn::SiluForward(z.data(), n, a.data());
    return a.data();
  }

  // `dy` is the gradient with respect to this layer's output.
  void Backward(const T* params, const T* dy, T* grad, T* dx) {
    const std::size_t n = out().size();
    const T* g = dy;
    if (act) {
      dz.assign(n, T(0));
      nn::SiluBackward(z.data(), dy, n, dz.data());
      g = dz.data();
    }
    nn::Conv3x3Backward(g, in, co, cols, params + w_off, grad + w_off, grad + b_off, dx, dcols);
  }
};

template <typename T>
class Network {
 public:
  explicit Network(const TranslatorModel& m)
      : kind_(m.kind), arch_(m.arch), n_out_(static_cast<int>(m.n_taxels())) {
    const PixelGrid g = m.model_grid();
    in_ = {1, g.rows, g.cols};
    const auto off = Offsets(m.tensors);
    auto make = [&](int layer, Shape3 in, int co, bool act) {
      ConvLayer<T> l;
      l.in = in;
      l.co = co;
      l.act = act;
      l.w_off = off[2 * layer];
      l.b_off = off[2 * layer + 1];
      return l;
    };
    if (kind_ == ModelKind::kArraySpace) {
      Shape3 s = in_;
      for (int l = 0; l < 3; ++l) {
        layers_.push_back(make(l, s, static_cast<int>(arch_[l]), true));
        s = nn::PooledShape(layers_.back().out());
      }
      top_ = s;
      dense_w_ = off[6];
      dense_b_ = off[7];
      pooled_.resize(3);
    } else {
      const int c1 = arch_[0], c2 = arch_[1], c3 = arch_[2], c4 = arch_[3];
      const Shape3 s1{c1, in_.h, in_.w};
      const Shape3 p1 = nn::PooledShape(s1);
      const Shape3 s2{c2, p1.h, p1.w};
      const Shape3 p2 = nn::PooledShape(s2);
      const Shape3 s3{c3, p2.h, p2.w};
      const Shape3 p3 = nn::PooledShape(s3);
      layers_.push_back(make(0, in_, c1, true));
      layers_.push_back(make(1, p1, c2, true));
      layers_.push_back(make(2, p2, c3, true));
      layers_.push_back(make(3, p3, c4, true));
      layers_.push_back(make(4, {c4 + c3, s3.h, s3.w}, c3, true));
      layers_.push_back(make(5, {c3 + c2, s2.h, s2.w}, c2, true));
      layers_.push_back(make(6, {c2 + c1, s1.h, s1.w}, c1, true));
      layers_.push_back(make(7, {c1, s1.h, s1.w}, 1, false));
      pooled_.resize(3);
      cat_.resize(3);
    }
  }

  std::size_t output_size() const {
    return kind_ == ModelKind::kArraySpace ? static_cast<std::size_t>(n_out_) : in_.plane();
  }

  // Normalized network output: N taxel values or the native generated image.
  const AlignedVector<T>& Forward(const T* params, const float* x) {
    x_.assign(x, x + in_.size());
    return kind_ == ModelKind::kArraySpace ? ForwardArray(params) : ForwardImage(params);
  }

  // Accumulates d(loss)/d(params) given d(loss)/d(output).
  void Backward(const T* params, const T* dout, T* grad) {
    if (kind_ == ModelKind::kArraySpace) {
      BackwardArray(params, dout, grad);
    } else {
      BackwardImage(params, dout, grad);
    }
  }

 private:
  const AlignedVector<T>& ForwardArray(const T* params) {
    const T* h = x_.data();
    for (int l = 0; l < 3; ++l) {
      const T* a = layers_[l].Forward(params, h);
      pooled_[l].resize(nn::PooledShape(layers_[l].out()).size());
      nn::AvgPool2Forward(a, layers_[l].out(), pooled_[l].data());
      h = pooled_[l].data();
    }
    const int ph = arch_[3], pw = arch_[4];
    feat_.resize(static_cast<std::size_t>(top_.c) * ph * pw);
    nn::AdaptivePoolForward(h, top_, ph, pw, feat_.data());
    out_.resize(n_out_);
    nn::DenseForward(feat_.data(), static_cast<int>(feat_.size()), params + dense_w_,
                     params + dense_b_, n_out_, out_.data());
    return out_;
  }

  void BackwardArray(const T* params, const T* dout, T* grad) {
    const int ph = arch_[3], pw = arch_[4];
    dfeat_.assign(feat_.size(), T(0));
    nn::DenseBackward(feat_.data(), static_cast<int>(feat_.size()), params + dense_w_, n_out_, dout,
                      grad + dense_w_, grad + dense_b_, dfeat_.data());
    dh_.assign(top_.size(), T(0));
    nn::AdaptivePoolBackward(dfeat_.data(), top_, ph, pw, dh_.data());
    for (int l = 2; l >= 0; --l) {
      da_.assign(layers_[l].out().size(), T(0));
      nn::AvgPool2Backward(dh_.data(), layers_[l].out(), da_.data());
      if (l > 0) {
        dh_.assign(layers_[l].in.size(), T(0));
        layers_[l].Backward(params, da_.data(), grad, dh_.data());
      } else {
        layers_[l].Backward(params, da_.data(), grad, nullptr);
      }
    }
  }

  // Encoder levels e1..e3 (layers 0..2), bottleneck (3), decoders d3, d2, d1
  // (4..6) fed by [upsampled deeper features; skip], output conv (7).
  const AlignedVector<T>& ForwardImage(const T* params) {
    const T* h = x_.data();
    std::array<const T*, 4> enc{};
    for (int l = 0; l < 4; ++l) {
      enc[l] = layers_[l].Forward(params, h);
      if (l < 3) {
        pooled_[l].resize(nn::PooledShape(layers_[l].out()).size());
        nn::AvgPool2Forward(enc[l], layers_[l].out(), pooled_[l].data());
        h = pooled_[l].data();
      }
    }
    const T* deeper = enc[3];
    Shape3 deeper_shape = layers_[3].out();
    for (int d = 0; d < 3; ++d) {
      const int skip = 2 - d;
      ConvLayer<T>& dec = layers_[4 + d];
      const Shape3 skip_shape = layers_[skip].out();
      AlignedVector<T>& cat = cat_[d];
      cat.resize(dec.in.size());
      nn::UpsampleForward(deeper, deeper_shape, skip_shape.h, skip_shape.w, cat.data());
      const std::size_t up_size = static_cast<std::size_t>(deeper_shape.c) * skip_shape.plane();
      std::copy(enc[skip], enc[skip] + skip_shape.size(), cat.begin() + up_size);
      deeper = dec.Forward(params, cat.data());
      deeper_shape = dec.out();
    }
    const T* y = layers_[7].Forward(params, deeper);
    out_.assign(y, y + in_.plane());
    return out_;
  }

  void BackwardImage(const T* params, const T* dout, T* grad) {
    // Gradient flowing into each encoder output through its skip connection.
    std::array<AlignedVector<T>, 3> dskip;
    AlignedVector<T> dnext(layers_[6].out().size(), T(0));
    layers_[7].Backward(params, dout, grad, dnext.data());
    for (int d = 2; d >= 0; --d) {
      const int skip = 2 - d;
      ConvLayer<T>& dec = layers_[4 + d];
      AlignedVector<T> dcat(dec.in.size(), T(0));
      dec.Backward(params, dnext.data(), grad, dcat.data());
      const Shape3 skip_shape = layers_[skip].out();
      const Shape3 deeper_shape = d == 0 ? layers_[3].out() : layers_[4 + d - 1].out();
      const std::size_t up_size = static_cast<std::size_t>(deeper_shape.c) * skip_shape.plane();
      dskip[skip].assign(dcat.begin() + up_size, dcat.end());
      dnext.assign(deeper_shape.size(), T(0));
      nn::UpsampleBackward(dcat.data(), deeper_shape, skip_shape.h, skip_shape.w, dnext.data());
    }
    // dnext now holds the bottleneck output gradient.
    AlignedVector<T> dpool(layers_[3].in.size(), T(0));
    layers_[3].Backward(params, dnext.data(), grad, dpool.data());
    for (int l = 2; l >= 0; --l) {
      AlignedVector<T> da = std::move(dskip[l]);
      nn::AvgPool2Backward(dpool.data(), layers_[l].out(), da.data());
      if (l > 0) {
        dpool.assign(layers_[l].in.size(), T(0));
        layers_[l].Backward(params, da.data(), grad, dpool.data());
      } else {
        layers_[l].Backward(params, da.data(), grad, nullptr);
      }
    }
  }

  ModelKind kind_;
  std::vector<std::uint32_t> arch_;
  int n_out_;
  Shape3 in_;
  Shape3 top_;
  std::size_t dense_w_ = 0, dense_b_ = 0;
  std::vector<ConvLayer<T>> layers_;
  std::vector<AlignedVector<T>> pooled_, cat_;
  AlignedVector<T> x_, feat_, out_, dfeat_, dh_, da_;
};

// Training loss and output gradient for one prepared sample. `y` is the
// normalized target, `target` the native-grid reconstruction target (may be
// empty when recon_weight is zero).
template <typename T>
T SampleLoss(Network<T>& net, const ImageHead* head, const T* params, const float* x,
             std::span<const double> y, std::span<const float> target, double recon_weight,
             T* grad) {
  const AlignedVector<T>& out = net.Forward(params, x);
  AlignedVector<T> dout(out.size(), T(0));
  T loss = 0;
  if (head == nullptr) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const T r = out[i] - static_cast<T>(y[i]);
      loss += r * r;
      dout[i] = 2 * r;
    }
  } else {
    for (std::size_t i = 0; i < head->taxel_rows.size(); ++i) {
      T pred = 0;
      for (const Tap& t : head->taxel_rows[i]) pred += static_cast<T>(t.weight) * out[t.index];
      const T r = pred - static_cast<T>(y[i]);
      loss += r * r;
      for (const Tap& t : head->taxel_rows[i]) dout[t.index] += 2 * r * static_cast<T>(t.weight);
    }
    if (recon_weight > 0.0) {
      const T scale = static_cast<T>(recon_weight * static_cast<double>(y.size()) /
                                     static_cast<double>(out.size()));
      for (std::size_t p = 0; p < out.size(); ++p) {
        const T r = out[p] - static_cast<T>(target[p]);
        loss += scale * r * r;
        dout[p] += 2 * scale * r;
      }
    }
  }
  if (grad != nullptr) net.Backward(params, dout.data(), grad);
  return loss;
}

std::vector<double> NormalizedTarget(const ArraySample& y, std::size_t n) {
  if (y.values.size() != n) {
    throw LengthMismatch("target has " + std::to_string(y.values.size()) + " values, model has " +
                         std::to_string(n) + " taxels");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = y.values[i] / kFullScale;
  return out;
}

// phi(y) sampled on the generator's native grid, normalized.
std::vector<float> ReconTarget(const PhiOperator& phi, const ArraySample& y, const PixelGrid& native) {
  TactileImage img = Resample(phi.Apply(y), native, 0.0f);
  std::vector<float> out(img.data().begin(), img.data().end());
  for (float& v : out) v = static_cast<float>(v / kFullScale);
  return out;
}

void RequireDifferentiable(const TranslatorModel& model) {
  if (model.kind == ModelKind::kLinearBaseline) {
    throw NonDifferentiableKind("linear_baseline is fitted in closed form");
  }
}

ArraySample LinearForward(const TranslatorModel& model, const TactileImage& prepared) {
  const std::size_t n = model.n_taxels();
  const std::size_t d = prepared.size();
  const float* w = model.parameters.data();
  const float* b = w + n * d;
  const auto x = prepared.data();
  ArraySample y;
  y.layout_id = model.layout.id();
  y.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = b[i];
    const float* row = w + i * d;
    for (std::size_t j = 0; j < d; ++j) acc += static_cast<double>(row[j]) * x[j];
    y.values[i] = static_cast<float>(acc);
  }
  ClampToFullScale(y.values);
  return y;
}

// Prediction machinery shared by Forward, Predict and training-time validation.
class Predictor {
 public:
  explicit Predictor(const TranslatorModel& model)
      : model_(model), params_(model.parameters.begin(), model.parameters.end()) {
    if (model.kind != ModelKind::kLinearBaseline) net_.emplace(model);
    if (model.kind == ModelKind::kImageSpace) {
      head_.emplace(model.model_grid(), model.output_grid, model.layout);
    }
  }

  ModelOutput Forward(const TactileImage& prepared) {
    switch (model_.kind) {
      case ModelKind::kLinearBaseline:
        return LinearForward(model_, prepared);
      case ModelKind::kArraySpace: {
        const auto& out = net_->Forward(params_.data(), prepared.data().data());
        ArraySample y;
        y.layout_id = model_.layout.id();
        y.values.resize(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
          y.values[i] = static_cast<float>(static_cast<double>(out[i]) * kFullScale);
        }
        ClampToFullScale(y.values);
        return y;
      }
      case ModelKind::kImageSpace: {
        const auto& out = net_->Forward(params_.data(), prepared.data().data());
        return head_->Render(out);
      }
    }
    throw InvalidArgument("unknown model kind");
  }

  ArraySample Predict(const TactileImage& prepared) {
    ModelOutput out = Forward(prepared);
    if (auto* img = std::get_if<TactileImage>(&out)) return PhiInv(*img, model_.layout);
    return std::get<ArraySample>(std::move(out));
  }

 private:
  const TranslatorModel& model_;
  AlignedVector<float> params_;
  std::optional<Network<float>> net_;
  std::optional<ImageHead> head_;
};

std::uint64_t UniformBits(std::mt19937_64& rng) { return rng() >> 11; }

double Uniform01(std::mt19937_64& rng) { return static_cast<double>(UniformBits(rng)) * 0x1.0p-53; }

std::vector<std::size_t> Shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

}  // namespace

std::string_view ModelKindName(ModelKind kind) {
  return kKindNames.at(static_cast<std::size_t>(kind));
}

ModelKind ModelKindFromName(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<ModelKind>(i);
  }
  throw InvalidArgument("unknown model kind '" + std::string(name) + "'");
}

TrainConfig DefaultTrainConfig(ModelKind kind) {
  TrainConfig cfg;
  if (kind == ModelKind::kImageSpace) {
    cfg.batch_size = 32;
  } else if (kind == ModelKind::kArraySpace) {
    cfg.learning_rate = 3e-3;
    cfg.lr_decay = 0.93;
    cfg.max_epochs = 60;
    cfg.patience = 10;
  }
  return cfg;
}

void ValidateTrainConfig(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw InvalidArgument("learning_rate must be positive");
  }
  if (!(cfg.lr_decay > 0.0 && cfg.lr_decay <= 1.0)) throw InvalidArgument("lr_decay must be in (0, 1]");
  if (cfg.batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (cfg.patience < 1) throw InvalidArgument("patience must be >= 1");
  if (cfg.max_epochs < 1) throw InvalidArgument("max_epochs must be >= 1");
  if (cfg.downsample < 1) throw InvalidArgument("downsample must be >= 1");
  if (!(cfg.ridge >= 0.0)) throw InvalidArgument("ridge must be >= 0");
  if (!(cfg.recon_weight >= 0.0)) throw InvalidArgument("recon_weight must be >= 0");
}

std::string TrainConfigToJson(const TrainConfig& cfg) {
  nlohmann::json j = {
      {"learning_rate", cfg.learning_rate}, {"lr_decay", cfg.lr_decay},
      {"batch_size", cfg.batch_size},
      {"max_epochs", cfg.max_epochs},       {"patience", cfg.patience},
      {"seed", cfg.seed},                   {"downsample", cfg.downsample},
      {"recon_weight", cfg.recon_weight},   {"ridge", cfg.ridge},
      {"channels", cfg.channels},
  };
  return j.dump();
}

TrainConfig TrainConfigFromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("invalid train config json: ") + e.what(), e.byte);
  }
  TrainConfig cfg;
  try {
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.lr_decay = j.value("lr_decay", cfg.lr_decay);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
    cfg.patience = j.value("patience", cfg.patience);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.downsample = j.value("downsample", cfg.downsample);
    cfg.recon_weight = j.value("recon_weight", cfg.recon_weight);
    cfg.ridge = j.value("ridge", cfg.ridge);
    cfg.channels = j.value("channels", cfg.channels);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed train config: ") + e.what());
  }
  ValidateTrainConfig(cfg);
  return cfg;
}

ModelGeometry DefaultModelGeometry() {
  TaxelLayout layout = BuildDefaultLayout();
  const PixelGrid tactile = FitTactileGrid(layout);
  return ModelGeometry{FitCameraGrid(tactile), std::move(layout), tactile};
}

std::size_t TensorSize(const TensorShape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

void ValidateModel(const TranslatorModel& model) {
  ValidateGrid(model.input_grid);
  ValidateGrid(model.output_grid);
  if (model.downsample < 1) throw InvalidArgument("downsample must be >= 1");
  const auto expected = ArchTensors(model.kind, model.arch, model.model_grid(),
                                    static_cast<std::uint32_t>(model.n_taxels()));
  if (expected != model.tensors) {
    throw InvalidArgument("layer descriptor does not match the architecture");
  }
  const std::size_t count = Offsets(model.tensors).back();
  if (count != model.parameters.size()) {
    throw InvalidArgument("descriptor expects " + std::to_string(count) + " parameters, model has " +
                          std::to_string(model.parameters.size()));
  }
  for (float p : model.parameters) {
    if (!std::isfinite(p)) throw InvalidArgument("model has non-finite parameters");
  }
}

TranslatorModel InitModel(ModelKind kind, const ModelGeometry& geometry, const TrainConfig& cfg) {
  ValidateTrainConfig(cfg);
  if (kind == ModelKind::kLinearBaseline) {
    throw NonDifferentiableKind("linear_baseline has no iterative initialization");
  }
  TranslatorModel m;
  m.kind = kind;
  m.input_grid = geometry.input_grid;
  m.downsample = cfg.downsample;
  m.arch = ResolveArch(kind, cfg.channels);
  m.layout = geometry.layout;
  m.output_grid = geometry.output_grid;
  m.tensors = ArchTensors(kind, m.arch, m.model_grid(), static_cast<std::uint32_t>(m.n_taxels()));
  m.parameters.resize(Offsets(m.tensors).back());

  std::mt19937_64 rng(DeriveSeed(cfg.seed, 0));
  std::size_t pos = 0;
  for (std::size_t t = 0; t < m.tensors.size(); t += 2) {
    const TensorShape& w = m.tensors[t];
    const std::size_t fan_in = TensorSize(w) / w[0];
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    const std::size_t n = TensorSize(w) + TensorSize(m.tensors[t + 1]);
    for (std::size_t i = 0; i < n; ++i) {
      m.parameters[pos++] = static_cast<float>(-s + 2.0 * s * Uniform01(rng));
    }
  }
  m.meta.seed = cfg.seed;
  m.meta.config_hash = Hash64(TrainConfigToJson(cfg));
  return m;
}

TactileImage PrepareInput(const TranslatorModel& model, const TactileImage& x) {
  const PixelGrid g = model.model_grid();
  if (x.rows() == g.rows && x.cols() == g.cols) return x;
  if (x.rows() == model.input_grid.rows && x.cols() == model.input_grid.cols) {
    return Downsample(x, model.downsample);
  }
  throw ShapeMismatch("input is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                      ", model expects " + std::to_string(model.input_grid.rows) + "x" +
                      std::to_string(model.input_grid.cols) + " or " + std::to_string(g.rows) +
                      "x" + std::to_string(g.cols));
}

double L3Loss(std::span<const float> y, std::span<const float> y_hat) {
  if (y.size() != y_hat.size()) {
    throw LengthMismatch("l3 of arrays of length " + std::to_string(y.size()) + " and " +
                         std::to_string(y_hat.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = static_cast<double>(y[i]) - y_hat[i];
    sum += d * d;
  }
  return sum;
}

double L3Loss(const ArraySample& y, const ArraySample& y_hat) { return L3Loss(y.values, y_hat.values); }

struct Inference::Impl {
  explicit Impl(TranslatorModel m) : model(std::move(m)), predictor(model) {}
  TranslatorModel model;
  Predictor predictor;
};

Inference::Inference(TranslatorModel model) {
  ValidateModel(model);
  impl_ = std::make_unique<Impl>(std::move(model));
}
Inference::~Inference() = default;
Inference::Inference(Inference&&) noexcept = default;
Inference& Inference::operator=(Inference&&) noexcept = default;

const TranslatorModel& Inference::model() const { return impl_->model; }

ModelOutput Inference::Forward(const TactileImage& x) {
  return impl_->predictor.Forward(PrepareInput(impl_->model, x));
}

ArraySample Inference::Predict(const TactileImage& x) {
  return impl_->predictor.Predict(PrepareInput(impl_->model, x));
}

ModelOutput Forward(const TranslatorModel& model, const TactileImage& x) {
  return Predictor(model).Forward(PrepareInput(model, x));
}

ArraySample Predict(const TranslatorModel& model, const TactileImage& x) {
  return Predictor(model).Predict(PrepareInput(model, x));
}

std::vector<float> Backward(const TranslatorModel& model, const TactileImage& x,
                            const ArraySample& y, const BackwardOptions& options) {
  RequireDifferentiable(model);
  std::vector<double> params(model.parameters.begin(), model.parameters.end());
  std::vector<double> grad(params.size(), 0.0);
  TrainingLoss(model, params, x, y, options, grad);
  return std::vector<float>(grad.begin(), grad.end());
}

double TrainingLoss(const TranslatorModel& model, std::span<const double> params,
                    const TactileImage& x, const ArraySample& y, const BackwardOptions& options,
                    std::span<double> grad) {
  RequireDifferentiable(model);
  if (params.size() != model.parameters.size()) {
    throw LengthMismatch("parameter vector has the wrong length");
  }
  if (!grad.empty() && grad.size() != params.size()) {
    throw LengthMismatch("gradient buffer has the wrong length");
  }
  if (!options.frozen.empty() && options.frozen.size() != model.tensors.size()) {
    throw LengthMismatch("frozen mask needs one entry per tensor");
  }
  const TactileImage prepared = PrepareInput(model, x);
  const std::vector<double> target = NormalizedTarget(y, model.n_taxels());
  Network<double> net(model);
  std::optional<ImageHead> head;
  std::vector<float> recon;
  if (model.kind == ModelKind::kImageSpace) {
    head.emplace(model.model_grid(), model.output_grid, model.layout);
    if (options.recon_weight > 0.0) {
      recon = ReconTarget(PhiOperator(model.layout, model.output_grid), y, model.model_grid());
    }
  }
  std::vector<double> local;
  double* g = nullptr;
  if (!grad.empty()) {
    local.assign(params.size(), 0.0);
    g = local.data();
  }
  const AlignedVector<double> p(params.begin(), params.end());
  const double loss = SampleLoss<double>(net, head ? &*head : nullptr, p.data(),
                                         prepared.data().data(), target, recon,
                                         options.recon_weight, g);
  if (g != nullptr) {
    const auto off = Offsets(model.tensors);
    for (std::size_t t = 0; t < model.tensors.size(); ++t) {
      const bool frozen = !options.frozen.empty() && options.frozen[t];
      for (std::size_t i = off[t]; i < off[t + 1]; ++i) grad[i] += frozen ? 0.0 : local[i];
    }
  }
  return loss;
}

TranslatorModel Train(ModelKind kind, const TrainConfig& cfg, std::span<const TrainingPair> train,
                      std::span<const TrainingPair> val, const ModelGeometry& geometry,
                      TrainLog* log) {
  ValidateTrainConfig(cfg);
  if (train.empty() || val.empty()) throw InvalidArgument("training and validation sets must be non-empty");
  TrainLog local_log;
  TrainLog& history = log ? *log : local_log;
  history = TrainLog{};

  if (kind == ModelKind::kLinearBaseline) {
    TranslatorModel m = FitLinearBaseline(train, cfg.ridge, geometry, cfg.downsample);
    Predictor predictor(m);
    double val_l3 = 0.0;
    for (const TrainingPair& p : val) val_l3 += L3Loss(p.y, predictor.Predict(PrepareInput(m, p.x)));
    m.meta = {0, val_l3 / static_cast<double>(val.size()), cfg.seed, Hash64(TrainConfigToJson(cfg))};
    history.val_l3.push_back(m.meta.best_val_l3);
    return m;
  }

  TranslatorModel model = InitModel(kind, geometry, cfg);
  const std::size_t n_taxels = model.n_taxels();
  const PixelGrid native = model.model_grid();

  std::vector<TactileImage> xs;
  std::vector<std::vector<double>> ys;
  std::vector<std::vector<float>> recon;
  xs.reserve(train.size());
  std::optional<PhiOperator> phi;
  if (kind == ModelKind::kImageSpace && cfg.recon_weight > 0.0) {
    phi.emplace(model.layout, model.output_grid);
  }
  for (const TrainingPair& p : train) {
    xs.push_back(PrepareInput(model, p.x));
    ys.push_back(NormalizedTarget(p.y, n_taxels));
    recon.push_back(phi ? ReconTarget(*phi, p.y, native) : std::vector<float>{});
  }
  std::vector<TactileImage> val_xs;
  for (const TrainingPair& p : val) {
    val_xs.push_back(PrepareInput(model, p.x));
    NormalizedTarget(p.y, n_taxels);
  }

  Network<float> net(model);
  std::optional<ImageHead> head;
  if (kind == ModelKind::kImageSpace) head.emplace(native, model.output_grid, model.layout);

  const std::size_t n_params = model.parameters.size();
  AlignedVector<float> params(model.parameters.begin(), model.parameters.end());
  AlignedVector<float> grad(n_params), m1(n_params, 0.0f), m2(n_params, 0.0f);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  std::uint64_t step = 0;

  std::mt19937_64 shuffle_rng(DeriveSeed(cfg.seed, 1));
  AlignedVector<float> best_params = params;
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  int epochs = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    epochs = epoch;
    const auto order = Shuffled(xs.size(), shuffle_rng);
    const double lr = cfg.learning_rate * std::pow(cfg.lr_decay, epoch - 1);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0f);
      double batch_loss = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        batch_loss += SampleLoss<float>(net, head ? &*head : nullptr, params.data(),
                                        xs[i].data().data(), ys[i], recon[i], cfg.recon_weight,
                                        grad.data());
      }
      if (!std::isfinite(batch_loss)) {
        throw Diverged("training loss became non-finite in epoch " + std::to_string(epoch));
      }
      epoch_loss += batch_loss;
      const float inv = 1.0f / static_cast<float>(end - start);
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      const float lr_t = static_cast<float>(lr * std::sqrt(c2) / c1);
      for (std::size_t j = 0; j < n_params; ++j) {
        const float g = grad[j] * inv;
        m1[j] = static_cast<float>(kBeta1) * m1[j] + static_cast<float>(1 - kBeta1) * g;
        m2[j] = static_cast<float>(kBeta2) * m2[j] + static_cast<float>(1 - kBeta2) * g * g;
        params[j] -= lr_t * m1[j] / (std::sqrt(m2[j]) + static_cast<float>(kEps * std::sqrt(c2)));
      }
    }
    for (float p : params) {
      if (!std::isfinite(p)) throw Diverged("parameters became non-finite in epoch " + std::to_string(epoch));
    }
    history.train_loss.push_back(epoch_loss / static_cast<double>(xs.size()));

    model.parameters.assign(params.begin(), params.end());
    Predictor predictor(model);
    double val_l3 = 0.0;
    for (std::size_t i = 0; i < val.size(); ++i) val_l3 += L3Loss(val[i].y, predictor.Predict(val_xs[i]));
    val_l3 /= static_cast<double>(val.size());
    history.val_l3.push_back(val_l3);

    if (val_l3 < best_val) {
      best_val = val_l3;
      best_params = params;
      history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }

  model.parameters.assign(best_params.begin(), best_params.end());
  model.meta = {static_cast<std::uint32_t>(epochs), best_val, cfg.seed,
                Hash64(TrainConfigToJson(cfg))};
  return model;
}

LinearDesign::LinearDesign(std::span<const TrainingPair> train, const ModelGeometry& geometry,
                           int downsample)
    : geometry_(geometry), downsample_(downsample) {
  const std::size_t n_taxels = geometry.layout.n_taxels();
  if (train.size() < n_taxels) {
    throw InvalidArgument("closed-form baseline needs at least " + std::to_string(n_taxels) +
                          " training pairs");
  }
  TranslatorModel shape;
  shape.kind = ModelKind::kLinearBaseline;
  shape.input_grid = geometry.input_grid;
  shape.downsample = downsample;
  const Eigen::Index d = static_cast<Eigen::Index>(shape.model_grid().size());
  const Eigen::Index n = static_cast<Eigen::Index>(train.size());
  x_.resize(n, d);
  y_.resize(n, static_cast<Eigen::Index>(n_taxels));
  for (Eigen::Index i = 0; i < n; ++i) {
    const TactileImage x = PrepareInput(shape, train[i].x);
    const auto xd = x.data();
    for (Eigen::Index j = 0; j < d; ++j) x_(i, j) = xd[j];
    if (train[i].y.values.size() != n_taxels) throw LengthMismatch("training target length differs from layout");
    for (std::size_t k = 0; k < n_taxels; ++k) y_(i, static_cast<Eigen::Index>(k)) = train[i].y.values[k];
  }
  x_mean_ = x_.colwise().mean().transpose();
  y_mean_ = y_.colwise().mean().transpose();
  x_.rowwise() -= x_mean_.transpose();
  y_.rowwise() -= y_mean_.transpose();
  gram_ = Eigen::MatrixXd::Zero(d, d);
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x_.transpose());
  gram_.triangularView<Eigen::StrictlyUpper>() = gram_.transpose();
  xty_ = x_.transpose() * y_;
}

double LinearDesign::GramScale() const { return gram_.diagonal().mean(); }

TranslatorModel LinearDesign::Solve(double ridge) const {
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw InvalidArgument("ridge must be a finite value >= 0");
  const Eigen::Index d = x_.cols();
  Eigen::MatrixXd w;
  if (ridge > 0.0) {
    Eigen::MatrixXd g = gram_;
    g.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success) throw SingularSystem("regularized normal equations are not positive definite");
    w = llt.solve(xty_);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x_);
    if (qr.rank() < d) {
      throw SingularSystem("design matrix has rank " + std::to_string(qr.rank()) + " < " +
                           std::to_string(d) + " features");
    }
    w = qr.solve(y_);
  }
  const Eigen::VectorXd b = y_mean_ - w.transpose() * x_mean_;

  TranslatorModel m;
  m.kind = ModelKind::kLinearBaseline;
  m.input_grid = geometry_.input_grid;
  m.downsample = downsample_;
  m.layout = geometry_.layout;
  m.output_grid = geometry_.output_grid;
  const auto n = static_cast<std::uint32_t>(m.n_taxels());
  m.tensors = ArchTensors(m.kind, m.arch, m.model_grid(), n);
  m.parameters.resize(static_cast<std::size_t>(n) * (d + 1));
  for (std::uint32_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      m.parameters[static_cast<std::size_t>(i) * d + j] = static_cast<float>(w(j, i));
    }
    m.parameters[static_cast<std::size_t>(n) * d + i] = static_cast<float>(b(i));
  }
  ValidateModel(m);
  return m;
}

TranslatorModel FitLinearBaseline(std::span<const TrainingPair> train, double ridge,
                                  const ModelGeometry& geometry, int downsample) {
  return LinearDesign(train, geometry, downsample).Solve(ridge);
}

namespace {

constexpr std::string_view kModelMagic = "T2TM";
constexpr std::uint32_t kModelVersion = 1;

void PutGrid(internal::ByteWriter& w, const PixelGrid& g) {
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(g.rows));
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(g.cols));
  w.Put<double>(g.origin.x);
  w.Put<double>(g.origin.y);
  w.Put<double>(g.spacing_x);
  w.Put<double>(g.spacing_y);
}

PixelGrid GetGrid(internal::ByteReader& r) {
  PixelGrid g;
  g.rows = static_cast<int>(r.Get<std::uint32_t>());
  g.cols = static_cast<int>(r.Get<std::uint32_t>());
  g.origin.x = r.Get<double>();
  g.origin.y = r.Get<double>();
  g.spacing_x = r.Get<double>();
  g.spacing_y = r.Get<double>();
  if (g.rows <= 0 || g.cols <= 0 || !(g.spacing_x > 0.0) || !(g.spacing_y > 0.0)) {
    r.Fail("invalid pixel grid");
  }
  return g;
}

// Guards allocations driven by counts read from the file.
std::uint32_t GetCount(internal::ByteReader& r, std::size_t element_bytes, const char* what) {
  const auto n = r.Get<std::uint32_t>();
  if (static_cast<std::uint64_t>(n) * element_bytes > r.remaining()) {
    r.Fail(std::string(what) + " count " + std::to_string(n) + " exceeds the file size");
  }
  return n;
}

}  // namespace

std::vector<std::uint8_t> SerializeModel(const TranslatorModel& model) {
  ValidateModel(model);
  internal::ByteWriter w;
  w.PutBytes(kModelMagic);
  w.Put<std::uint32_t>(kModelVersion);
  w.Put<std::uint8_t>(static_cast<std::uint8_t>(model.kind));
  PutGrid(w, model.input_grid);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(model.downsample));
  PutGrid(w, model.output_grid);
  const auto& pos = model.layout.positions();
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(pos.size()));
  w.Put<double>(model.layout.pitch());
  w.Put<double>(model.layout.sensing_radius());
  for (const Vec2& p : pos) {
    w.Put<double>(p.x);
    w.Put<double>(p.y);
  }
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(model.arch.size()));
  w.PutArray<std::uint32_t>(model.arch);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(model.tensors.size()));
  for (const TensorShape& t : model.tensors) {
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(t.size()));
    w.PutArray<std::uint32_t>(t);
  }
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(model.parameters.size()));
  w.PutArray<float>(model.parameters);
  w.Put<std::uint32_t>(model.meta.epochs_run);
  w.Put<double>(model.meta.best_val_l3);
  w.Put<std::uint64_t>(model.meta.seed);
  w.Put<std::uint64_t>(model.meta.config_hash);
  return std::move(w.bytes());
}

TranslatorModel DeserializeModel(std::span<const std::uint8_t> bytes) {
  internal::ByteReader r(bytes, "model file");
  r.Expect(kModelMagic);
  const auto version = r.Get<std::uint32_t>();
  if (version != kModelVersion) r.Fail("unsupported version " + std::to_string(version));
  const auto kind = r.Get<std::uint8_t>();
  if (kind >= kKindNames.size()) r.Fail("unknown model kind " + std::to_string(kind));

  TranslatorModel m;
  m.kind = static_cast<ModelKind>(kind);
  m.input_grid = GetGrid(r);
  const auto downsample = r.Get<std::uint32_t>();
  if (downsample < 1 || downsample > static_cast<std::uint32_t>(std::min(m.input_grid.rows, m.input_grid.cols))) {
    r.Fail("invalid downsample factor " + std::to_string(downsample));
  }
  m.downsample = static_cast<int>(downsample);
  m.output_grid = GetGrid(r);

  const std::uint32_t n_taxels = GetCount(r, 0, "taxel");
  const double pitch = r.Get<double>();
  const double radius = r.Get<double>();
  if (static_cast<std::uint64_t>(n_taxels) * 16 > r.remaining()) r.Fail("taxel count exceeds the file size");
  std::vector<Vec2> positions(n_taxels);
  for (Vec2& p : positions) {
    p.x = r.Get<double>();
    p.y = r.Get<double>();
  }
  const std::size_t layout_at = r.pos();
  try {
    m.layout = TaxelLayout(std::move(positions), pitch, radius);
  } catch (const Error& e) {
    throw FormatError(std::string("model file: invalid layout: ") + e.what(), layout_at);
  }

  m.arch.resize(GetCount(r, 4, "architecture"));
  r.GetArray<std::uint32_t>(m.arch);
  m.tensors.resize(GetCount(r, 4, "tensor"));
  for (TensorShape& t : m.tensors) {
    t.resize(GetCount(r, 4, "dimension"));
    r.GetArray<std::uint32_t>(t);
  }
  m.parameters.resize(GetCount(r, 4, "parameter"));
  r.GetArray<float>(m.parameters);
  m.meta.epochs_run = r.Get<std::uint32_t>();
  m.meta.best_val_l3 = r.Get<double>();
  m.meta.seed = r.Get<std::uint64_t>();
  m.meta.config_hash = r.Get<std::uint64_t>();
  r.ExpectEnd();
  try {
    ValidateModel(m);
  } catch (const Error& e) {
    throw FormatError(std::string("model file: ") + e.what(), bytes.size());
  }
  return m;
}

void SaveModel(const TranslatorModel& model, const std::filesystem::path& path) {
  internal::WriteFileBytes(path, SerializeModel(model));
}

TranslatorModel LoadModel(const std::filesystem::path& path) {
  return DeserializeModel(internal::ReadFileBytes(path));
}

}  // namespace t2t
