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

#ifndef T2T_NN_HPP_
#define T2T_NN_HPP_

// Channel-major (C, H, W) tensor kernels with hand-written gradients. All
// backward routines accumulate into their gradient outputs.

#include <Eigen/Core>
#include <Eigen/StdVector>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace t2t::nn {

struct Shape3 {
  int c = 0;
  int h = 0;
  int w = 0;
  std::size_t size() const { return static_cast<std::size_t>(c) * h * w; }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

// Buffers aligned to Eigen's widest packet, so vectorized kernels split work
// identically on every call and results do not depend on heap addresses.
template <typename T>
using AlignedVector = std::vector<T, Eigen::aligned_allocator<T>>;

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

// Row (ci * 9 + ky * 3 + kx), column (y * w + x) holds in[ci, y + ky - 1, x + kx - 1],
// zero outside the image.
template <typename T>
void Im2Col(const T* in, Shape3 s, T* cols) {
  const std::size_t plane = s.plane();
  for (int ci = 0; ci < s.c; ++ci) {
    const T* src = in + ci * plane;
    for (int k = 0; k < 9; ++k) {
      const int dy = k / 3 - 1, dx = k % 3 - 1;
      T* dst = cols + (static_cast<std::size_t>(ci) * 9 + k) * plane;
      for (int y = 0; y < s.h; ++y) {
        const int sy = y + dy;
        T* row = dst + static_cast<std::size_t>(y) * s.w;
        if (sy < 0 || sy >= s.h) {
          std::fill(row, row + s.w, T(0));
          continue;
        }
        const T* srow = src + static_cast<std::size_t>(sy) * s.w;
        for (int x = 0; x < s.w; ++x) {
          const int sx = x + dx;
          row[x] = (sx >= 0 && sx < s.w) ? srow[sx] : T(0);
        }
      }
    }
  }
}

template <typename T>
void Col2Im(const T* cols, Shape3 s, T* din) {
  const std::size_t plane = s.plane();
  for (int ci = 0; ci < s.c; ++ci) {
    T* dst = din + ci * plane;
    for (int k = 0; k < 9; ++k) {
      const int dy = k / 3 - 1, dx = k % 3 - 1;
      const T* src = cols + (static_cast<std::size_t>(ci) * 9 + k) * plane;
      for (int y = 0; y < s.h; ++y) {
        const int sy = y + dy;
        if (sy < 0 || sy >= s.h) continue;
        const T* row = src + static_cast<std::size_t>(y) * s.w;
        T* drow = dst + static_cast<std::size_t>(sy) * s.w;
        const int x0 = std::max(0, -dx), x1 = std::min(s.w, s.w - dx);
        for (int x = x0; x < x1; ++x) drow[x + dx] += row[x];
      }
    }
  }
}

// 3x3 convolution, stride 1, zero padding 1. Weights are (co, ci, 3, 3).
// `cols` receives the im2col buffer (ci * 9 x h * w) for the backward pass.
template <typename T>
void Conv3x3Forward(const T* in, Shape3 s, const T* weight, const T* bias, int co, T* out,
                    AlignedVector<T>& cols) {
  const Eigen::Index hw = static_cast<Eigen::Index>(s.plane());
  const Eigen::Index k = static_cast<Eigen::Index>(s.c) * 9;
  cols.resize(static_cast<std::size_t>(k * hw));
  Im2Col(in, s, cols.data());
  MatMap<T> o(out, co, hw);
  o.noalias() = ConstMatMap<T>(weight, co, k) * ConstMatMap<T>(cols.data(), k, hw);
  for (int c = 0; c < co; ++c) o.row(c).array() += bias[c];
}

// `din` may be null when the input gradient is not needed.
template <typename T>
void Conv3x3Backward(const T* dout, Shape3 s, int co, const AlignedVector<T>& cols,
                     const T* weight, T* dweight, T* dbias, T* din, AlignedVector<T>& dcols) {
  const Eigen::Index hw = static_cast<Eigen::Index>(s.plane());
  const Eigen::Index k = static_cast<Eigen::Index>(s.c) * 9;
  ConstMatMap<T> g(dout, co, hw);
  MatMap<T>(dweight, co, k).noalias() += g * ConstMatMap<T>(cols.data(), k, hw).transpose();
  for (int c = 0; c < co; ++c) dbias[c] += g.row(c).sum();
  if (din == nullptr) return;
  dcols.resize(static_cast<std::size_t>(k * hw));
  MatMap<T>(dcols.data(), k, hw).noalias() = ConstMatMap<T>(weight, co, k).transpose() * g;
  Col2Im(dcols.data(), s, din);
}

template <typename T>
T Sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

// SiLU: z * sigmoid(z); smooth with f(0) = 0.
template <typename T>
void SiluForward(const T* z, std::size_t n, T* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i] * Sigmoid(z[i]);
}

template <typename T>
void SiluBackward(const T* z, const T* dout, std::size_t n, T* dz) {
  for (std::size_t i = 0; i < n; ++i) {
    const T s = Sigmoid(z[i]);
    dz[i] += dout[i] * (s + z[i] * s * (T(1) - s));
  }
}

inline Shape3 PooledShape(Shape3 s) { return {s.c, (s.h + 1) / 2, (s.w + 1) / 2}; }

// 2x2 average pooling in ceil mode; edge windows average their valid cells.
template <typename T>
void AvgPool2Forward(const T* in, Shape3 s, T* out) {
  const Shape3 o = PooledShape(s);
  for (int c = 0; c < s.c; ++c) {
    const T* src = in + c * s.plane();
    T* dst = out + c * o.plane();
    for (int y = 0; y < o.h; ++y) {
      const int y0 = 2 * y, y1 = std::min(2 * y + 2, s.h);
      for (int x = 0; x < o.w; ++x) {
        const int x0 = 2 * x, x1 = std::min(2 * x + 2, s.w);
        T acc = 0;
        for (int yy = y0; yy < y1; ++yy) {
          for (int xx = x0; xx < x1; ++xx) acc += src[yy * s.w + xx];
        }
        dst[y * o.w + x] = acc / T((y1 - y0) * (x1 - x0));
      }
    }
  }
}

template <typename T>
void AvgPool2Backward(const T* dout, Shape3 s, T* din) {
  const Shape3 o = PooledShape(s);
  for (int c = 0; c < s.c; ++c) {
    const T* g = dout + c * o.plane();
    T* dst = din + c * s.plane();
    for (int y = 0; y < o.h; ++y) {
      const int y0 = 2 * y, y1 = std::min(2 * y + 2, s.h);
      for (int x = 0; x < o.w; ++x) {
        const int x0 = 2 * x, x1 = std::min(2 * x + 2, s.w);
        const T v = g[y * o.w + x] / T((y1 - y0) * (x1 - x0));
        for (int yy = y0; yy < y1; ++yy) {
          for (int xx = x0; xx < x1; ++xx) dst[yy * s.w + xx] += v;
        }
      }
    }
  }
}

// Nearest-neighbour resize of (c, h, w) to (c, oh, ow); source index floor(i * h / oh).
template <typename T>
void UpsampleForward(const T* in, Shape3 s, int oh, int ow, T* out) {
  for (int c = 0; c < s.c; ++c) {
    const T* src = in + c * s.plane();
    T* dst = out + static_cast<std::size_t>(c) * oh * ow;
    for (int y = 0; y < oh; ++y) {
      const int sy = y * s.h / oh;
      for (int x = 0; x < ow; ++x) dst[y * ow + x] = src[sy * s.w + x * s.w / ow];
    }
  }
}

template <typename T>
void UpsampleBackward(const T* dout, Shape3 s, int oh, int ow, T* din) {
  for (int c = 0; c < s.c; ++c) {
    const T* g = dout + static_cast<std::size_t>(c) * oh * ow;
    T* dst = din + c * s.plane();
    for (int y = 0; y < oh; ++y) {
      const int sy = y * s.h / oh;
      for (int x = 0; x < ow; ++x) dst[sy * s.w + x * s.w / ow] += g[y * ow + x];
    }
  }
}

// Adaptive average pooling to (oh, ow): bin i spans [floor(i*h/oh), ceil((i+1)*h/oh)).
template <typename T>
void AdaptivePoolForward(const T* in, Shape3 s, int oh, int ow, T* out) {
  for (int c = 0; c < s.c; ++c) {
    const T* src = in + c * s.plane();
    for (int i = 0; i < oh; ++i) {
      const int y0 = i * s.h / oh, y1 = ((i + 1) * s.h + oh - 1) / oh;
      for (int j = 0; j < ow; ++j) {
        const int x0 = j * s.w / ow, x1 = ((j + 1) * s.w + ow - 1) / ow;
        T acc = 0;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) acc += src[y * s.w + x];
        }
        out[(static_cast<std::size_t>(c) * oh + i) * ow + j] = acc / T((y1 - y0) * (x1 - x0));
      }
    }
  }
}

template <typename T>
void AdaptivePoolBackward(const T* dout, Shape3 s, int oh, int ow, T* din) {
  for (int c = 0; c < s.c; ++c) {
    T* dst = din + c * s.plane();
    for (int i = 0; i < oh; ++i) {
      const int y0 = i * s.h / oh, y1 = ((i + 1) * s.h + oh - 1) / oh;
      for (int j = 0; j < ow; ++j) {
        const int x0 = j * s.w / ow, x1 = ((j + 1) * s.w + ow - 1) / ow;
        const T v = dout[(static_cast<std::size_t>(c) * oh + i) * ow + j] / T((y1 - y0) * (x1 - x0));
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) dst[y * s.w + x] += v;
        }
      }
    }
  }
}

// out = W in + b with W of shape (n_out, n_in).
template <typename T>
void DenseForward(const T* in, int n_in, const T* weight, const T* bias, int n_out, T* out) {
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> o(out, n_out);
  o.noalias() = ConstMatMap<T>(weight, n_out, n_in) *
                Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>(in, n_in);
  for (int i = 0; i < n_out; ++i) out[i] += bias[i];
}

template <typename T>
void DenseBackward(const T* in, int n_in, const T* weight, int n_out, const T* dout, T* dweight,
                   T* dbias, T* din) {
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  Eigen::Map<const Vec> g(dout, n_out), x(in, n_in);
  MatMap<T>(dweight, n_out, n_in).noalias() += g * x.transpose();
  for (int i = 0; i < n_out; ++i) dbias[i] += dout[i];
  if (din != nullptr) {
    Eigen::Map<Vec>(din, n_in).noalias() += ConstMatMap<T>(weight, n_out, n_in).transpose() * g;
  }
}

}  // namespace t2t::nn

#endif  // T2T_NN_HPP_
