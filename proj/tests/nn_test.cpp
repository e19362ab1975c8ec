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

#include "t2t/nn.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <vector>

namespace t2t::nn {
namespace {

std::vector<double> RandomVector(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Checks the adjoint of a linear-in-input map f against central differences of
// <g, f(x)> with respect to x.
void ExpectInputGradient(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                         const std::vector<double>& x, const std::vector<double>& g,
                         const std::vector<double>& analytic) {
  const double h = 1e-5;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (Dot(g, f(xp)) - Dot(g, f(xm))) / (2 * h);
    EXPECT_NEAR(analytic[i], fd, 1e-7 * (1 + std::abs(fd))) << "coordinate " << i;
  }
}

TEST(ConvTest, MatchesDirectSummation) {
  std::mt19937_64 rng(1);
  const Shape3 s{3, 5, 7};
  const int co = 4;
  const auto in = RandomVector(s.size(), rng);
  const auto w = RandomVector(static_cast<std::size_t>(co) * s.c * 9, rng);
  const auto b = RandomVector(co, rng);
  std::vector<double> out(static_cast<std::size_t>(co) * s.plane());
  AlignedVector<double> cols;
  Conv3x3Forward(in.data(), s, w.data(), b.data(), co, out.data(), cols);
  for (int o = 0; o < co; ++o) {
    for (int y = 0; y < s.h; ++y) {
      for (int x = 0; x < s.w; ++x) {
        double acc = b[o];
        for (int c = 0; c < s.c; ++c) {
          for (int ky = 0; ky < 3; ++ky) {
            for (int kx = 0; kx < 3; ++kx) {
              const int sy = y + ky - 1, sx = x + kx - 1;
              if (sy < 0 || sy >= s.h || sx < 0 || sx >= s.w) continue;
              acc += w[((o * s.c + c) * 3 + ky) * 3 + kx] * in[(c * s.h + sy) * s.w + sx];
            }
          }
        }
        EXPECT_NEAR(out[(o * s.h + y) * s.w + x], acc, 1e-12);
      }
    }
  }
}

TEST(ConvTest, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  const Shape3 s{2, 4, 3};
  const int co = 3;
  const auto in = RandomVector(s.size(), rng);
  auto w = RandomVector(static_cast<std::size_t>(co) * s.c * 9, rng);
  const auto b = RandomVector(co, rng);
  const auto g = RandomVector(static_cast<std::size_t>(co) * s.plane(), rng);
  auto run = [&](const std::vector<double>& x, const std::vector<double>& wt) {
    std::vector<double> out(static_cast<std::size_t>(co) * s.plane());
    AlignedVector<double> cols;
    Conv3x3Forward(x.data(), s, wt.data(), b.data(), co, out.data(), cols);
    return out;
  };
  std::vector<double> out(g.size());
  AlignedVector<double> cols, dcols;
  Conv3x3Forward(in.data(), s, w.data(), b.data(), co, out.data(), cols);
  std::vector<double> dw(w.size(), 0.0), db(co, 0.0), din(in.size(), 0.0);
  Conv3x3Backward(g.data(), s, co, cols, w.data(), dw.data(), db.data(), din.data(), dcols);

  ExpectInputGradient([&](const auto& x) { return run(x, w); }, in, g, din);
  ExpectInputGradient([&](const auto& wt) { return run(in, wt); }, w, g, dw);
  for (int o = 0; o < co; ++o) {
    double sum = 0;
    for (std::size_t p = 0; p < s.plane(); ++p) sum += g[o * s.plane() + p];
    EXPECT_NEAR(db[o], sum, 1e-12);
  }
}

TEST(ConvTest, BackwardAccumulates) {
  std::mt19937_64 rng(3);
  const Shape3 s{1, 3, 3};
  const auto in = RandomVector(s.size(), rng);
  const auto w = RandomVector(9, rng);
  const std::vector<double> b{0.0};
  const auto g = RandomVector(9, rng);
  std::vector<double> out(9);
  AlignedVector<double> cols, dcols;
  Conv3x3Forward(in.data(), s, w.data(), b.data(), 1, out.data(), cols);
  std::vector<double> dw(9, 0.0), db(1, 0.0), din(9, 0.0);
  Conv3x3Backward(g.data(), s, 1, cols, w.data(), dw.data(), db.data(), din.data(), dcols);
  auto dw2 = dw, db2 = db, din2 = din;
  Conv3x3Backward(g.data(), s, 1, cols, w.data(), dw2.data(), db2.data(), din2.data(), dcols);
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(dw2[i], 2 * dw[i], 1e-12);
    EXPECT_NEAR(din2[i], 2 * din[i], 1e-12);
  }
  EXPECT_NEAR(db2[0], 2 * db[0], 1e-12);
}

TEST(SiluTest, ValuesAndDerivative) {
  const std::vector<double> z{-3.0, -0.5, 0.0, 0.7, 4.0};
  std::vector<double> a(z.size());
  SiluForward(z.data(), z.size(), a.data());
  for (std::size_t i = 0; i < z.size(); ++i) {
    EXPECT_NEAR(a[i], z[i] / (1 + std::exp(-z[i])), 1e-15);
  }
  EXPECT_EQ(a[2], 0.0);
  const std::vector<double> ones(z.size(), 1.0);
  std::vector<double> dz(z.size(), 0.0);
  SiluBackward(z.data(), ones.data(), z.size(), dz.data());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double h = 1e-6;
    const double fd = ((z[i] + h) / (1 + std::exp(-(z[i] + h))) - (z[i] - h) / (1 + std::exp(-(z[i] - h)))) / (2 * h);
    EXPECT_NEAR(dz[i], fd, 1e-8);
  }
  EXPECT_DOUBLE_EQ(dz[2], 0.5);
}

TEST(PoolTest, CeilModeAveragesValidCells) {
  const Shape3 s{1, 3, 3};
  const std::vector<double> in{1, 2, 3, 4, 5, 6, 7, 8, 9};
  EXPECT_EQ(PooledShape(s), (Shape3{1, 2, 2}));
  std::vector<double> out(4);
  AvgPool2Forward(in.data(), s, out.data());
  EXPECT_DOUBLE_EQ(out[0], (1 + 2 + 4 + 5) / 4.0);
  EXPECT_DOUBLE_EQ(out[1], (3 + 6) / 2.0);
  EXPECT_DOUBLE_EQ(out[2], (7 + 8) / 2.0);
  EXPECT_DOUBLE_EQ(out[3], 9.0);
}

TEST(PoolTest, BackwardIsAdjoint) {
  std::mt19937_64 rng(4);
  const Shape3 s{2, 5, 4};
  const auto x = RandomVector(s.size(), rng);
  const auto g = RandomVector(PooledShape(s).size(), rng);
  std::vector<double> din(s.size(), 0.0);
  AvgPool2Backward(g.data(), s, din.data());
  auto f = [&](const std::vector<double>& v) {
    std::vector<double> out(PooledShape(s).size());
    AvgPool2Forward(v.data(), s, out.data());
    return out;
  };
  ExpectInputGradient(f, x, g, din);
}

TEST(UpsampleTest, NearestIndexing) {
  const Shape3 s{1, 2, 2};
  const std::vector<double> in{1, 2, 3, 4};
  std::vector<double> out(12);
  UpsampleForward(in.data(), s, 3, 4, out.data());
  const std::vector<double> expected{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4};
  EXPECT_EQ(out, expected);
}

TEST(UpsampleTest, BackwardIsAdjoint) {
  std::mt19937_64 rng(5);
  const Shape3 s{2, 3, 2};
  const int oh = 5, ow = 4;
  const auto x = RandomVector(s.size(), rng);
  const auto g = RandomVector(static_cast<std::size_t>(s.c) * oh * ow, rng);
  std::vector<double> din(s.size(), 0.0);
  UpsampleBackward(g.data(), s, oh, ow, din.data());
  auto f = [&](const std::vector<double>& v) {
    std::vector<double> out(static_cast<std::size_t>(s.c) * oh * ow);
    UpsampleForward(v.data(), s, oh, ow, out.data());
    return out;
  };
  ExpectInputGradient(f, x, g, din);
}

TEST(AdaptivePoolTest, OverlappingBins) {
  const Shape3 s{1, 1, 5};
  const std::vector<double> in{1, 2, 3, 4, 5};
  std::vector<double> out(2);
  AdaptivePoolForward(in.data(), s, 1, 2, out.data());
  EXPECT_DOUBLE_EQ(out[0], 2.0);  // cells 0..2
  EXPECT_DOUBLE_EQ(out[1], 4.0);  // cells 2..4
}

TEST(AdaptivePoolTest, IdentityWhenSizesMatch) {
  std::mt19937_64 rng(6);
  const Shape3 s{2, 3, 4};
  const auto x = RandomVector(s.size(), rng);
  std::vector<double> out(s.size());
  AdaptivePoolForward(x.data(), s, 3, 4, out.data());
  EXPECT_EQ(out, x);
}

TEST(AdaptivePoolTest, BackwardIsAdjoint) {
  std::mt19937_64 rng(7);
  const Shape3 s{2, 7, 6};
  const auto x = RandomVector(s.size(), rng);
  const auto g = RandomVector(static_cast<std::size_t>(s.c) * 5 * 4, rng);
  std::vector<double> din(s.size(), 0.0);
  AdaptivePoolBackward(g.data(), s, 5, 4, din.data());
  auto f = [&](const std::vector<double>& v) {
    std::vector<double> out(static_cast<std::size_t>(s.c) * 5 * 4);
    AdaptivePoolForward(v.data(), s, 5, 4, out.data());
    return out;
  };
  ExpectInputGradient(f, x, g, din);
}

TEST(DenseTest, ForwardAndBackward) {
  std::mt19937_64 rng(8);
  const int n_in = 6, n_out = 3;
  const auto x = RandomVector(n_in, rng);
  const auto w = RandomVector(n_in * n_out, rng);
  const auto b = RandomVector(n_out, rng);
  const auto g = RandomVector(n_out, rng);
  std::vector<double> out(n_out);
  DenseForward(x.data(), n_in, w.data(), b.data(), n_out, out.data());
  for (int i = 0; i < n_out; ++i) {
    double acc = b[i];
    for (int j = 0; j < n_in; ++j) acc += w[i * n_in + j] * x[j];
    EXPECT_NEAR(out[i], acc, 1e-14);
  }
  std::vector<double> dw(w.size(), 0.0), db(n_out, 0.0), din(n_in, 0.0);
  DenseBackward(x.data(), n_in, w.data(), n_out, g.data(), dw.data(), db.data(), din.data());
  for (int i = 0; i < n_out; ++i) {
    EXPECT_DOUBLE_EQ(db[i], g[i]);
    for (int j = 0; j < n_in; ++j) EXPECT_NEAR(dw[i * n_in + j], g[i] * x[j], 1e-15);
  }
  auto f = [&](const std::vector<double>& v) {
    std::vector<double> o(n_out);
    DenseForward(v.data(), n_in, w.data(), b.data(), n_out, o.data());
    return o;
  };
  ExpectInputGradient(f, x, g, din);
}

}  // namespace
}  // namespace t2t::nn
