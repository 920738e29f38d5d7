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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qden/rng.hpp"
#include "qden/tensor.hpp"

namespace qden::nn {

// Layer kernels on NHWC batches. Each *_forward has a matching *_backward
// that maps the upstream gradient to input (and parameter) gradients.

/// Stride 1, zero "same" padding, odd square kernel. w is (k, k, in, out),
/// b is (out).
Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b);

struct Conv2dGrads {
  Tensor dx;  // empty when not requested
  Tensor dw;
  Tensor db;
};

Conv2dGrads conv2d_backward(const Tensor& x, const Tensor& w, const Tensor& dy, bool want_dx = true);

Tensor relu_forward(const Tensor& x);
/// `x` is the forward input.
Tensor relu_backward(const Tensor& x, const Tensor& dy);

struct PoolResult {
  Tensor y;
  std::vector<std::uint32_t> argmax;  // flat input index per output element
};

/// 2x2 window, stride 2. Ties go to the first element in row-major order.
PoolResult maxpool2_forward(const Tensor& x);
Tensor maxpool2_backward(const std::vector<std::uint32_t>& argmax, const std::vector<std::size_t>& input_shape,
                         const Tensor& dy);

/// Nearest-neighbour 2x upsampling.
Tensor upsample2_forward(const Tensor& x);
Tensor upsample2_backward(const Tensor& dy);

struct DropoutResult {
  Tensor y;
  Tensor mask;  // 0 or 1/(1-rate); empty when the layer was an identity
};

/// Inverted dropout. Identity in eval mode or when rate == 0.
DropoutResult dropout_forward(const Tensor& x, double rate, bool train_mode, Rng& rng);
Tensor dropout_backward(const Tensor& mask, const Tensor& dy);

struct LossResult {
  double loss = 0.0;
  double mse = 0.0;
  double mean_fidelity = 0.0;  // batch mean of the surrogate fidelity
  double mae = 0.0;
  Tensor grad;  // dL/dpred
};

/// L = MSE(Y, Yhat) + lambda * (1 - mean_n F_n) on (N, dim, dim, 2) batches.
/// MSE averages over every element; F_n is the normalized Frobenius inner
/// product of sample n's complex matrices. A prediction with norm below
/// 1e-30 gets F_n = 0 and no fidelity gradient.
LossResult composite_loss(const Tensor& pred, const Tensor& target, double lambda);

}  // namespace qden::nn
