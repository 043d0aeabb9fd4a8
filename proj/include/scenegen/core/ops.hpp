// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "scenegen/core/tensor.hpp"

namespace scenegen {

// ---- elementwise ----
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor neg(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

// ---- activations ----
Tensor gelu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor tanh_act(const Tensor& a);
Tensor relu(const Tensor& a);
// Elementwise clamp; gradient is zero where the bound is active.
Tensor clamp_op(const Tensor& a, double lo, double hi);

// ---- shape ----
Tensor reshape(const Tensor& a, const Shape& s);
Tensor permute(const Tensor& a, const std::vector<int>& perm);
Tensor slice(const Tensor& a, int axis, int start, int len);
Tensor concat(const std::vector<Tensor>& xs, int axis);
// Right-aligned broadcast: missing leading axes are added, size-1 axes expand.
Tensor broadcast(const Tensor& a, const Shape& target);

// Non-overlapping p-by-p patch extraction for channels-last images.
// (B,H,W,C) -> (B, (H/p)*(W/p), p*p*C); patches walk row-major over the grid.
Tensor space_to_patches(const Tensor& a, int p);
Tensor patches_to_space(const Tensor& a, int height, int width, int p, int channels);

// ---- linear algebra ----
// (..., M, K) x (K, N) -> (..., M, N)
Tensor matmul(const Tensor& a, const Tensor& w);
// (B, M, K) x (B, K, N) -> (B, M, N); transpose_b treats b as (B, N, K).
Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b = false);

// ---- normalization ----
Tensor softmax_last(const Tensor& a);
Tensor layer_norm_last(const Tensor& a, const Tensor& gamma, const Tensor& beta,
                       double eps = 1e-5);

// ---- reductions / indexing ----
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
// Scalar pick by flat index (grad routes to that element).
Tensor select_flat(const Tensor& a, std::int64_t index);

// ---- convolution (channels-last) ----
struct Conv2dSpec {
  int kh = 3, kw = 3;
  int stride = 1;
  int pad = 1;
};
// x: (B,H,W,Cin), w: (kh*kw*Cin, Cout) flat, bias: (Cout) or undefined.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int cin, int cout,
              const Conv2dSpec& spec);
// Non-overlapping k-by-k average pooling: (B,H,W,C) -> (B,H/k,W/k,C).
Tensor avg_pool2d(const Tensor& x, int k);
// Nearest-neighbor 2x upsample: (B,H,W,C) -> (B,2H,2W,C).
Tensor upsample_nearest2x(const Tensor& x);

// ---- composed helpers ----
// Mean of squared differences over all elements.
Tensor mse(const Tensor& a, const Tensor& b);
// Sum of squared differences over all elements.
Tensor sse(const Tensor& a, const Tensor& b);

}  // namespace scenegen
