// Copyright 2026 The qden Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qden/nn.hpp"

#include <cmath>

#include "qden/error.hpp"
#include "qden/metrics.hpp"

namespace qden::nn {
namespace {

void require_rank4(const Tensor& t, const char* op) {
  if (t.rank() != 4) {
    throw InvalidArgument(std::string(op) + ": expected an NHWC tensor, got shape " + shape_to_string(t.shape()));
  }
}

}  // namespace

Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
  require_rank4(x, "conv2d");
  if (w.rank() != 4 || w.dim(0) != w.dim(1) || w.dim(0) % 2 == 0) {
    throw InvalidArgument("conv2d: weights must be (k, k, in, out) with odd k, got " + shape_to_string(w.shape()));
  }
  if (w.dim(2) != x.dim(3)) {
    throw InvalidArgument("conv2d: input has " + std::to_string(x.dim(3)) + " channels, weights expect " +
                          std::to_string(w.dim(2)));
  }
  if (b.rank() != 1 || b.dim(0) != w.dim(3)) throw InvalidArgument("conv2d: bias shape mismatch");

  const std::size_t n_batch = x.dim(0), height = x.dim(1), width = x.dim(2), cin = x.dim(3);
  const std::size_t k = w.dim(0), cout = w.dim(3);
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  Tensor y({n_batch, height, width, cout});
  const double* xd = x.data().data();
  const double* wd = w.data().data();
  const double* bd = b.data().data();
  double* yd = y.data().data();

  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t oy = 0; oy < height; ++oy) {
      for (std::size_t ox = 0; ox < width; ++ox) {
        double* yrow = yd + ((n * height + oy) * width + ox) * cout;
        for (std::size_t co = 0; co < cout; ++co) yrow[co] = bd[co];
        for (std::size_t ky = 0; ky < k; ++ky) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ky) - pad;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(height)) continue;
          for (std::size_t kx = 0; kx < k; ++kx) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kx) - pad;
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(width)) continue;
            const double* xrow = xd + ((n * height + iy) * width + ix) * cin;
            const double* wtap = wd + (ky * k + kx) * cin * cout;
            for (std::size_t ci = 0; ci < cin; ++ci) {
              const double xv = xrow[ci];
              const double* wrow = wtap + ci * cout;
              for (std::size_t co = 0; co < cout; ++co) yrow[co] += xv * wrow[co];
            }
          }
        }
      }
    }
  }
  return y;
}

Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, bool want_dx) {
  require_rank4(x, "conv2d_backward");
  const std::size_t n_batch = x.dim(0), height = x.dim(1), width = x.dim(2), cin = x.dim(3);
  const std::size_t k = w.dim(0), cout = w.dim(3);
  if (dy.shape() != std::vector<std::size_t>{n_batch, height, width, cout}) {
    throw InvalidArgument("conv2d_backward: upstream gradient shape " + shape_to_string(dy.shape()));
  }
  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  Conv2dGrads g;
  if (want_dx) g.dx = Tensor(x.shape());
  g.dw = Tensor(w.shape());
  g.db = Tensor({cout});
  const double* xd = x.data().data();
  const double* wd = w.data().data();
  const double* dyd = dy.data().data();
  double* dxd = want_dx ? g.dx.data().data() : nullptr;
  double* dwd = g.dw.data().data();
  double* dbd = g.db.data().data();

  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t oy = 0; oy < height; ++oy) {
      for (std::size_t ox = 0; ox < width; ++ox) {
        const double* dyrow = dyd + ((n * height + oy) * width + ox) * cout;
        for (std::size_t co = 0; co < cout; ++co) dbd[co] += dyrow[co];
        for (std::size_t ky = 0; ky < k; ++ky) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy + ky) - pad;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(height)) continue;
          for (std::size_t kx = 0; kx < k; ++kx) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox + kx) - pad;
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(width)) continue;
            const std::size_t xoff = ((n * height + iy) * width + ix) * cin;
            const std::size_t tap = (ky * k + kx) * cin * cout;
            for (std::size_t ci = 0; ci < cin; ++ci) {
              const double xv = xd[xoff + ci];
              const double* wrow = wd + tap + ci * cout;
              double* dwrow = dwd + tap + ci * cout;
              double acc = 0.0;
              for (std::size_t co = 0; co < cout; ++co) {
                dwrow[co] += xv * dyrow[co];
                acc += wrow[co] * dyrow[co];
              }
              if (dxd) dxd[xoff + ci] += acc;
            }
          }
        }
      }
    }
  }
  return g;
}

Tensor relu_forward(const Tensor& x) {
  Tensor y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& dy) {
  if (x.shape() != dy.shape()) throw InvalidArgument("relu_backward: shape mismatch");
  Tensor dx = dy;
  const auto xd = x.data();
  auto dxd = dx.data();
  for (std::size_t i = 0; i < dxd.size(); ++i)
    if (!(xd[i] > 0.0)) dxd[i] = 0.0;
  return dx;
}

PoolResult maxpool2_forward(const Tensor& x) {
  require_rank4(x, "maxpool2");
  const std::size_t n_batch = x.dim(0), height = x.dim(1), width = x.dim(2), ch = x.dim(3);
  if (height % 2 || width % 2) {
    throw InvalidArgument("maxpool2: spatial dims must be even, got " + shape_to_string(x.shape()));
  }
  PoolResult r{Tensor({n_batch, height / 2, width / 2, ch}), {}};
  r.argmax.resize(r.y.numel());
  const double* xd = x.data().data();
  double* yd = r.y.data().data();
  std::size_t out = 0;
  for (std::size_t n = 0; n < n_batch; ++n)
    for (std::size_t oy = 0; oy < height / 2; ++oy)
      for (std::size_t ox = 0; ox < width / 2; ++ox)
        for (std::size_t c = 0; c < ch; ++c, ++out) {
          std::size_t best = ((n * height + 2 * oy) * width + 2 * ox) * ch + c;
          for (std::size_t dy = 0; dy < 2; ++dy)
            for (std::size_t dx = 0; dx < 2; ++dx) {
              const std::size_t idx = ((n * height + 2 * oy + dy) * width + 2 * ox + dx) * ch + c;
              if (xd[idx] > xd[best]) best = idx;
            }
          yd[out] = xd[best];
          r.argmax[out] = static_cast<std::uint32_t>(best);
        }
  return r;
}

Tensor maxpool2_backward(const std::vector<std::uint32_t>& argmax, const std::vector<std::size_t>& input_shape,
                         const Tensor& dy) {
  if (argmax.size() != dy.numel()) throw InvalidArgument("maxpool2_backward: routing size mismatch");
  Tensor dx(input_shape);
  auto dxd = dx.data();
  const auto dyd = dy.data();
  for (std::size_t i = 0; i < argmax.size(); ++i) dxd[argmax[i]] += dyd[i];
  return dx;
}

Tensor upsample2_forward(const Tensor& x) {
  require_rank4(x, "upsample2");
  const std::size_t n_batch = x.dim(0), height = x.dim(1), width = x.dim(2), ch = x.dim(3);
  Tensor y({n_batch, 2 * height, 2 * width, ch});
  for (std::size_t n = 0; n < n_batch; ++n)
    for (std::size_t oy = 0; oy < 2 * height; ++oy)
      for (std::size_t ox = 0; ox < 2 * width; ++ox)
        for (std::size_t c = 0; c < ch; ++c) y.at(n, oy, ox, c) = x.at(n, oy / 2, ox / 2, c);
  return y;
}

Tensor upsample2_backward(const Tensor& dy) {
  require_rank4(dy, "upsample2_backward");
  const std::size_t n_batch = dy.dim(0), height = dy.dim(1), width = dy.dim(2), ch = dy.dim(3);
  if (height % 2 || width % 2) throw InvalidArgument("upsample2_backward: odd upstream dims");
  Tensor dx({n_batch, height / 2, width / 2, ch});
  for (std::size_t n = 0; n < n_batch; ++n)
    for (std::size_t oy = 0; oy < height; ++oy)
      for (std::size_t ox = 0; ox < width; ++ox)
        for (std::size_t c = 0; c < ch; ++c) dx.at(n, oy / 2, ox / 2, c) += dy.at(n, oy, ox, c);
  return dx;
}

DropoutResult dropout_forward(const Tensor& x, double rate, bool train_mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgument("dropout: rate must lie in [0, 1)");
  if (!train_mode || rate == 0.0) return {x, Tensor()};
  DropoutResult r{x, Tensor(x.shape())};
  const double keep_scale = 1.0 / (1.0 - rate);
  auto yd = r.y.data();
  auto md = r.mask.data();
  for (std::size_t i = 0; i < yd.size(); ++i) {
    md[i] = rng.uniform01() < rate ? 0.0 : keep_scale;
    yd[i] *= md[i];
  }
  return r;
}

Tensor dropout_backward(const Tensor& mask, const Tensor& dy) {
  if (mask.numel() == 0) return dy;
  if (mask.shape() != dy.shape()) throw InvalidArgument("dropout_backward: shape mismatch");
  Tensor dx = dy;
  auto dxd = dx.data();
  const auto md = mask.data();
  for (std::size_t i = 0; i < dxd.size(); ++i) dxd[i] *= md[i];
  return dx;
}

LossResult composite_loss(const Tensor& pred, const Tensor& target, double lambda) {
  if (pred.shape() != target.shape()) {
    throw InvalidArgument("composite_loss: prediction shape " + shape_to_string(pred.shape()) +
                          " != target shape " + shape_to_string(target.shape()));
  }
  if (pred.rank() != 4 || pred.dim(3) != 2 || pred.dim(0) == 0) {
    throw InvalidArgument("composite_loss: expected a non-empty (N, dim, dim, 2) batch");
  }
  if (!(lambda >= 0.0)) throw InvalidArgument("composite_loss: lambda must be non-negative");

  const std::size_t n_batch = pred.dim(0);
  const std::size_t per_sample = pred.numel() / n_batch;
  const auto p = pred.data();
  const auto t = target.data();
  LossResult r;
  r.grad = Tensor(pred.shape());
  auto g = r.grad.data();

  const double inv_total = 1.0 / static_cast<double>(pred.numel());
  double sq = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    sq += d * d;
    abs_sum += std::abs(d);
    g[i] = 2.0 * d * inv_total;
  }
  r.mse = sq * inv_total;
  r.mae = abs_sum * inv_total;

  // Re<T, P> over the complex matrix equals the real dot product of the
  // interleaved (re, im) channels, and the Frobenius norms match too.
  double fid_sum = 0.0;
  const double scale = lambda / static_cast<double>(n_batch);
  for (std::size_t n = 0; n < n_batch; ++n) {
    const std::size_t off = n * per_sample;
    double dot = 0.0, pp = 0.0, tt = 0.0;
    for (std::size_t i = 0; i < per_sample; ++i) {
      dot += p[off + i] * t[off + i];
      pp += p[off + i] * p[off + i];
      tt += t[off + i] * t[off + i];
    }
    const double np = std::sqrt(pp), nt = std::sqrt(tt);
    if (np < kSurrogateNormFloor || nt < kSurrogateNormFloor) continue;
    const double fid = dot / (np * nt);
    fid_sum += fid;
    if (scale == 0.0) continue;
    const double a = 1.0 / (np * nt);
    const double c = dot / (np * np * np * nt);
    for (std::size_t i = 0; i < per_sample; ++i) g[off + i] -= scale * (a * t[off + i] - c * p[off + i]);
  }
  r.mean_fidelity = fid_sum / static_cast<double>(n_batch);
  r.loss = r.mse + lambda * (1.0 - r.mean_fidelity);
  return r;
}

}  // namespace qden::nn
