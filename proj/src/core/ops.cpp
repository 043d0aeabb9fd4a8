// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/core/ops.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace scenegen {

namespace {

using MatRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapM = Eigen::Map<MatRM>;
using MapCM = Eigen::Map<const MatRM>;

std::vector<std::int64_t> strides_of(const Shape& s) {
  std::vector<std::int64_t> st(s.size());
  std::int64_t acc = 1;
  for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
    st[i] = acc;
    acc *= s[i];
  }
  return st;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                                " vs " + shape_str(b.shape()));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "add");
  return make_op(a.shape(), a.array() + b.array(), {a, b}, [a, b](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad += n.grad; }
    if (b.requires_grad()) { b.node()->ensure_grad(); b.node()->grad += n.grad; }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "sub");
  return make_op(a.shape(), a.array() - b.array(), {a, b}, [a, b](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad += n.grad; }
    if (b.requires_grad()) { b.node()->ensure_grad(); b.node()->grad -= n.grad; }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "mul");
  return make_op(a.shape(), a.array() * b.array(), {a, b}, [a, b](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad += n.grad * b.array(); }
    if (b.requires_grad()) { b.node()->ensure_grad(); b.node()->grad += n.grad * a.array(); }
  });
}

Tensor div(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b, "div");
  return make_op(a.shape(), a.array() / b.array(), {a, b}, [a, b](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad += n.grad / b.array(); }
    if (b.requires_grad()) {
      b.node()->ensure_grad();
      b.node()->grad -= n.grad * a.array() / (b.array() * b.array());
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  return make_op(a.shape(), a.array() * s, {a}, [a, s](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad += n.grad * s; }
  });
}

Tensor add_scalar(const Tensor& a, double s) {
  return make_op(a.shape(), a.array() + s, {a}, [a](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad += n.grad; }
  });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor gelu(const Tensor& a) {
  const Eigen::ArrayXd& x = a.array();
  Eigen::ArrayXd y(x.size());
  for (std::int64_t i = 0; i < x.size(); ++i)
    y(i) = 0.5 * x(i) * (1.0 + std::erf(x(i) * M_SQRT1_2));
  return make_op(a.shape(), std::move(y), {a}, [a](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    const Eigen::ArrayXd& x = a.array();
    constexpr double kInvSqrt2Pi = 0.3989422804014327;
    for (std::int64_t i = 0; i < x.size(); ++i) {
      double cdf = 0.5 * (1.0 + std::erf(x(i) * M_SQRT1_2));
      double pdf = kInvSqrt2Pi * std::exp(-0.5 * x(i) * x(i));
      a.node()->grad(i) += n.grad(i) * (cdf + x(i) * pdf);
    }
  });
}

Tensor sigmoid(const Tensor& a) {
  Eigen::ArrayXd y = 1.0 / (1.0 + (-a.array()).exp());
  return make_op(a.shape(), std::move(y), {a}, [a](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    a.node()->grad += n.grad * n.value * (1.0 - n.value);
  });
}

Tensor tanh_act(const Tensor& a) {
  Eigen::ArrayXd y = a.array().tanh();
  return make_op(a.shape(), std::move(y), {a}, [a](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    a.node()->grad += n.grad * (1.0 - n.value * n.value);
  });
}

Tensor relu(const Tensor& a) {
  Eigen::ArrayXd y = a.array().max(0.0);
  return make_op(a.shape(), std::move(y), {a}, [a](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    a.node()->grad += n.grad * (a.array() > 0.0).cast<double>();
  });
}

Tensor clamp_op(const Tensor& a, double lo, double hi) {
  Eigen::ArrayXd y = a.array().max(lo).min(hi);
  return make_op(a.shape(), std::move(y), {a}, [a, lo, hi](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    a.node()->grad +=
        n.grad * ((a.array() > lo).cast<double>() * (a.array() < hi).cast<double>());
  });
}

Tensor reshape(const Tensor& a, const Shape& s) {
  if (shape_size(s) != a.size())
    throw std::invalid_argument("reshape: cannot view " + shape_str(a.shape()) + " as " +
                                shape_str(s));
  return make_op(s, a.array(), {a}, [a](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad += n.grad; }
  });
}

Tensor permute(const Tensor& a, const std::vector<int>& perm) {
  const int nd = a.ndim();
  if (static_cast<int>(perm.size()) != nd)
    throw std::invalid_argument("permute: rank mismatch for " + shape_str(a.shape()));
  const auto st = strides_of(a.shape());
  Shape os(nd);
  for (int i = 0; i < nd; ++i) os[i] = a.shape()[perm[i]];
  const std::int64_t n = a.size();
  auto map = std::make_shared<std::vector<std::int64_t>>(n);
  std::vector<int> idx(nd, 0);
  for (std::int64_t o = 0; o < n; ++o) {
    std::int64_t src = 0;
    for (int i = 0; i < nd; ++i) src += static_cast<std::int64_t>(idx[i]) * st[perm[i]];
    (*map)[o] = src;
    for (int i = nd - 1; i >= 0; --i) {
      if (++idx[i] < os[i]) break;
      idx[i] = 0;
    }
  }
  Eigen::ArrayXd v(n);
  for (std::int64_t o = 0; o < n; ++o) v(o) = a.array()((*map)[o]);
  return make_op(os, std::move(v), {a}, [a, map](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    for (std::int64_t o = 0; o < n.grad.size(); ++o) a.node()->grad((*map)[o]) += n.grad(o);
  });
}

Tensor slice(const Tensor& a, int axis, int start, int len) {
  const int nd = a.ndim();
  if (axis < 0) axis += nd;
  if (axis < 0 || axis >= nd || start < 0 || len < 0 || start + len > a.shape()[axis])
    throw std::invalid_argument("slice: bad range [" + std::to_string(start) + "," +
                                std::to_string(start + len) + ") on axis " + std::to_string(axis) +
                                " of " + shape_str(a.shape()));
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= a.shape()[i];
  for (int i = axis + 1; i < nd; ++i) inner *= a.shape()[i];
  const std::int64_t d = a.shape()[axis];
  Shape os = a.shape();
  os[axis] = len;
  Eigen::ArrayXd v(outer * len * inner);
  for (std::int64_t o = 0; o < outer; ++o)
    std::memcpy(v.data() + o * len * inner, a.data() + (o * d + start) * inner,
                sizeof(double) * len * inner);
  return make_op(os, std::move(v), {a}, [a, axis, start, len, outer, inner, d](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    for (std::int64_t o = 0; o < outer; ++o) {
      double* dst = a.node()->grad.data() + (o * d + start) * inner;
      const double* src = n.grad.data() + o * len * inner;
      for (std::int64_t i = 0; i < len * inner; ++i) dst[i] += src[i];
    }
  });
}

Tensor concat(const std::vector<Tensor>& xs, int axis) {
  if (xs.empty()) throw std::invalid_argument("concat: empty input list");
  const int nd = xs[0].ndim();
  if (axis < 0) axis += nd;
  Shape os = xs[0].shape();
  int total = 0;
  for (const auto& x : xs) {
    if (x.ndim() != nd) throw std::invalid_argument("concat: rank mismatch");
    for (int i = 0; i < nd; ++i)
      if (i != axis && x.shape()[i] != os[i])
        throw std::invalid_argument("concat: shape mismatch " + shape_str(x.shape()) + " vs " +
                                    shape_str(os) + " on non-concat axis");
    total += x.shape()[axis];
  }
  os[axis] = total;
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= os[i];
  for (int i = axis + 1; i < nd; ++i) inner *= os[i];
  Eigen::ArrayXd v(shape_size(os));
  std::int64_t off = 0;
  for (const auto& x : xs) {
    const std::int64_t d = x.shape()[axis];
    for (std::int64_t o = 0; o < outer; ++o)
      std::memcpy(v.data() + (o * total + off) * inner, x.data() + o * d * inner,
                  sizeof(double) * d * inner);
    off += d;
  }
  std::vector<Tensor> parents = xs;
  return make_op(os, std::move(v), parents,
                 [parents, axis, outer, inner, total](detail::TensorNode& n) {
                   std::int64_t off = 0;
                   for (const auto& x : parents) {
                     const std::int64_t d = x.shape()[axis];
                     if (x.requires_grad()) {
                       x.node()->ensure_grad();
                       for (std::int64_t o = 0; o < outer; ++o) {
                         double* dst = x.node()->grad.data() + o * d * inner;
                         const double* src = n.grad.data() + (o * total + off) * inner;
                         for (std::int64_t i = 0; i < d * inner; ++i) dst[i] += src[i];
                       }
                     }
                     off += d;
                   }
                 });
}

Tensor broadcast(const Tensor& a, const Shape& target) {
  const int nd = static_cast<int>(target.size());
  const int ad = a.ndim();
  if (ad > nd)
    throw std::invalid_argument("broadcast: source rank exceeds target " + shape_str(a.shape()) +
                                " -> " + shape_str(target));
  Shape padded(nd, 1);
  for (int i = 0; i < ad; ++i) padded[nd - ad + i] = a.shape()[i];
  for (int i = 0; i < nd; ++i)
    if (padded[i] != target[i] && padded[i] != 1)
      throw std::invalid_argument("broadcast: incompatible " + shape_str(a.shape()) + " -> " +
                                  shape_str(target));
  if (padded == target) return reshape(a, target);
  const auto sst = strides_of(padded);
  const std::int64_t n = shape_size(target);
  auto map = std::make_shared<std::vector<std::int64_t>>(n);
  std::vector<int> idx(nd, 0);
  for (std::int64_t o = 0; o < n; ++o) {
    std::int64_t src = 0;
    for (int i = 0; i < nd; ++i)
      if (padded[i] != 1) src += static_cast<std::int64_t>(idx[i]) * sst[i];
    (*map)[o] = src;
    for (int i = nd - 1; i >= 0; --i) {
      if (++idx[i] < target[i]) break;
      idx[i] = 0;
    }
  }
  Eigen::ArrayXd v(n);
  for (std::int64_t o = 0; o < n; ++o) v(o) = a.array()((*map)[o]);
  return make_op(target, std::move(v), {a}, [a, map](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    for (std::int64_t o = 0; o < n.grad.size(); ++o) a.node()->grad((*map)[o]) += n.grad(o);
  });
}

Tensor space_to_patches(const Tensor& a, int p) {
  if (a.ndim() != 4)
    throw std::invalid_argument("space_to_patches: need (B,H,W,C), got " + shape_str(a.shape()));
  const int B = a.dim(0), H = a.dim(1), W = a.dim(2), C = a.dim(3);
  if (H % p != 0 || W % p != 0)
    throw std::invalid_argument("space_to_patches: patch " + std::to_string(p) +
                                " does not divide " + shape_str(a.shape()));
  const int nh = H / p, nw = W / p;
  Shape os{B, nh * nw, p * p * C};
  Eigen::ArrayXd v(shape_size(os));
  for (int b = 0; b < B; ++b)
    for (int i = 0; i < nh; ++i)
      for (int j = 0; j < nw; ++j) {
        double* dst = v.data() + ((static_cast<std::int64_t>(b) * nh * nw + i * nw + j)) * p * p * C;
        for (int py = 0; py < p; ++py)
          for (int px = 0; px < p; ++px)
            std::memcpy(dst + (py * p + px) * C,
                        a.data() + ((static_cast<std::int64_t>(b) * H + i * p + py) * W + j * p + px) * C,
                        sizeof(double) * C);
      }
  return make_op(os, std::move(v), {a}, [a, p, B, H, W, C, nh, nw](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    for (int b = 0; b < B; ++b)
      for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nw; ++j) {
          const double* src =
              n.grad.data() + ((static_cast<std::int64_t>(b) * nh * nw + i * nw + j)) * p * p * C;
          for (int py = 0; py < p; ++py)
            for (int px = 0; px < p; ++px) {
              double* dst = a.node()->grad.data() +
                            ((static_cast<std::int64_t>(b) * H + i * p + py) * W + j * p + px) * C;
              const double* s = src + (py * p + px) * C;
              for (int c = 0; c < C; ++c) dst[c] += s[c];
            }
        }
  });
}

Tensor patches_to_space(const Tensor& a, int height, int width, int p, int channels) {
  if (a.ndim() != 3)
    throw std::invalid_argument("patches_to_space: need (B,T,p*p*C), got " + shape_str(a.shape()));
  const int B = a.dim(0), T = a.dim(1);
  const int nh = height / p, nw = width / p;
  if (T != nh * nw || a.dim(2) != p * p * channels)
    throw std::invalid_argument("patches_to_space: " + shape_str(a.shape()) +
                                " inconsistent with target " + std::to_string(height) + "x" +
                                std::to_string(width) + "x" + std::to_string(channels));
  Shape os{B, height, width, channels};
  Eigen::ArrayXd v(shape_size(os));
  const int C = channels;
  for (int b = 0; b < B; ++b)
    for (int i = 0; i < nh; ++i)
      for (int j = 0; j < nw; ++j) {
        const double* src = a.data() + ((static_cast<std::int64_t>(b) * T + i * nw + j)) * p * p * C;
        for (int py = 0; py < p; ++py)
          for (int px = 0; px < p; ++px)
            std::memcpy(v.data() +
                            ((static_cast<std::int64_t>(b) * height + i * p + py) * width + j * p + px) * C,
                        src + (py * p + px) * C, sizeof(double) * C);
      }
  return make_op(os, std::move(v), {a}, [a, p, B, nh, nw, C, height, width, T](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    for (int b = 0; b < B; ++b)
      for (int i = 0; i < nh; ++i)
        for (int j = 0; j < nw; ++j) {
          double* dst =
              a.node()->grad.data() + ((static_cast<std::int64_t>(b) * T + i * nw + j)) * p * p * C;
          for (int py = 0; py < p; ++py)
            for (int px = 0; px < p; ++px) {
              const double* src =
                  n.grad.data() +
                  ((static_cast<std::int64_t>(b) * height + i * p + py) * width + j * p + px) * C;
              double* d = dst + (py * p + px) * C;
              for (int c = 0; c < C; ++c) d[c] += src[c];
            }
        }
  });
}

Tensor matmul(const Tensor& a, const Tensor& w) {
  if (a.ndim() < 2 || w.ndim() != 2)
    throw std::invalid_argument("matmul: need (...,M,K) x (K,N), got " + shape_str(a.shape()) +
                                " x " + shape_str(w.shape()));
  const int K = a.dim(-1);
  if (K != w.dim(0))
    throw std::invalid_argument("matmul: inner dims differ " + shape_str(a.shape()) + " x " +
                                shape_str(w.shape()));
  const int N = w.dim(1);
  const std::int64_t R = a.size() / K;
  Shape os = a.shape();
  os.back() = N;
  Eigen::ArrayXd v(R * N);
  MapCM A(a.data(), R, K), W(w.data(), K, N);
  MapM(v.data(), R, N).noalias() = A * W;
  return make_op(os, std::move(v), {a, w}, [a, w, R, K, N](detail::TensorNode& n) {
    MapCM dC(n.grad.data(), R, N);
    MapCM A(a.data(), R, K), W(w.data(), K, N);
    if (a.requires_grad()) {
      a.node()->ensure_grad();
      MapM(a.node()->grad.data(), R, K).noalias() += dC * W.transpose();
    }
    if (w.requires_grad()) {
      w.node()->ensure_grad();
      MapM(w.node()->grad.data(), K, N).noalias() += A.transpose() * dC;
    }
  });
}

Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b) {
  if (a.ndim() != 3 || b.ndim() != 3 || a.dim(0) != b.dim(0))
    throw std::invalid_argument("bmm: need (B,M,K) x (B,*,*), got " + shape_str(a.shape()) + " x " +
                                shape_str(b.shape()));
  const int B = a.dim(0), M = a.dim(1), K = a.dim(2);
  const int N = transpose_b ? b.dim(1) : b.dim(2);
  const int bK = transpose_b ? b.dim(2) : b.dim(1);
  if (bK != K)
    throw std::invalid_argument("bmm: inner dims differ " + shape_str(a.shape()) + " x " +
                                shape_str(b.shape()));
  Eigen::ArrayXd v(static_cast<std::int64_t>(B) * M * N);
  for (int i = 0; i < B; ++i) {
    MapCM A(a.data() + static_cast<std::int64_t>(i) * M * K, M, K);
    MapM C(v.data() + static_cast<std::int64_t>(i) * M * N, M, N);
    if (transpose_b) {
      MapCM Bm(b.data() + static_cast<std::int64_t>(i) * N * K, N, K);
      C.noalias() = A * Bm.transpose();
    } else {
      MapCM Bm(b.data() + static_cast<std::int64_t>(i) * K * N, K, N);
      C.noalias() = A * Bm;
    }
  }
  return make_op({B, M, N}, std::move(v), {a, b},
                 [a, b, B, M, K, N, transpose_b](detail::TensorNode& n) {
                   for (int i = 0; i < B; ++i) {
                     MapCM dC(n.grad.data() + static_cast<std::int64_t>(i) * M * N, M, N);
                     MapCM A(a.data() + static_cast<std::int64_t>(i) * M * K, M, K);
                     if (transpose_b) {
                       MapCM Bm(b.data() + static_cast<std::int64_t>(i) * N * K, N, K);
                       if (a.requires_grad()) {
                         a.node()->ensure_grad();
                         MapM(a.node()->grad.data() + static_cast<std::int64_t>(i) * M * K, M, K)
                             .noalias() += dC * Bm;
                       }
                       if (b.requires_grad()) {
                         b.node()->ensure_grad();
                         MapM(b.node()->grad.data() + static_cast<std::int64_t>(i) * N * K, N, K)
                             .noalias() += dC.transpose() * A;
                       }
                     } else {
                       MapCM Bm(b.data() + static_cast<std::int64_t>(i) * K * N, K, N);
                       if (a.requires_grad()) {
                         a.node()->ensure_grad();
                         MapM(a.node()->grad.data() + static_cast<std::int64_t>(i) * M * K, M, K)
                             .noalias() += dC * Bm.transpose();
                       }
                       if (b.requires_grad()) {
                         b.node()->ensure_grad();
                         MapM(b.node()->grad.data() + static_cast<std::int64_t>(i) * K * N, K, N)
                             .noalias() += A.transpose() * dC;
                       }
                     }
                   }
                 });
}

Tensor softmax_last(const Tensor& a) {
  const int D = a.dim(-1);
  const std::int64_t R = a.size() / D;
  Eigen::ArrayXd v(a.size());
  for (std::int64_t r = 0; r < R; ++r) {
    Eigen::Map<const Eigen::ArrayXd> x(a.data() + r * D, D);
    Eigen::Map<Eigen::ArrayXd> y(v.data() + r * D, D);
    y = (x - x.maxCoeff()).exp();
    y /= y.sum();
  }
  return make_op(a.shape(), std::move(v), {a}, [a, R, D](detail::TensorNode& n) {
    if (!a.requires_grad()) return;
    a.node()->ensure_grad();
    for (std::int64_t r = 0; r < R; ++r) {
      Eigen::Map<const Eigen::ArrayXd> y(n.value.data() + r * D, D);
      Eigen::Map<const Eigen::ArrayXd> dy(n.grad.data() + r * D, D);
      double s = (dy * y).sum();
      Eigen::Map<Eigen::ArrayXd>(a.node()->grad.data() + r * D, D) += (dy - s) * y;
    }
  });
}

Tensor layer_norm_last(const Tensor& a, const Tensor& gamma, const Tensor& beta, double eps) {
  const int D = a.dim(-1);
  if (gamma.size() != D || beta.size() != D)
    throw std::invalid_argument("layer_norm_last: affine size mismatch with " +
                                shape_str(a.shape()));
  const std::int64_t R = a.size() / D;
  auto xhat = std::make_shared<Eigen::ArrayXd>(a.size());
  auto invstd = std::make_shared<Eigen::ArrayXd>(R);
  Eigen::ArrayXd v(a.size());
  Eigen::Map<const Eigen::ArrayXd> g(gamma.data(), D), bt(beta.data(), D);
  for (std::int64_t r = 0; r < R; ++r) {
    Eigen::Map<const Eigen::ArrayXd> x(a.data() + r * D, D);
    const double mu = x.mean();
    const double var = (x - mu).square().mean();
    const double inv = 1.0 / std::sqrt(var + eps);
    (*invstd)(r) = inv;
    Eigen::Map<Eigen::ArrayXd> xh(xhat->data() + r * D, D);
    xh = (x - mu) * inv;
    Eigen::Map<Eigen::ArrayXd>(v.data() + r * D, D) = xh * g + bt;
  }
  return make_op(a.shape(), std::move(v), {a, gamma, beta},
                 [a, gamma, beta, xhat, invstd, R, D](detail::TensorNode& n) {
                   Eigen::Map<const Eigen::ArrayXd> g(gamma.data(), D);
                   for (std::int64_t r = 0; r < R; ++r) {
                     Eigen::Map<const Eigen::ArrayXd> dy(n.grad.data() + r * D, D);
                     Eigen::Map<const Eigen::ArrayXd> xh(xhat->data() + r * D, D);
                     if (gamma.requires_grad()) {
                       gamma.node()->ensure_grad();
                       Eigen::Map<Eigen::ArrayXd>(gamma.node()->grad.data(), D) += dy * xh;
                     }
                     if (beta.requires_grad()) {
                       beta.node()->ensure_grad();
                       Eigen::Map<Eigen::ArrayXd>(beta.node()->grad.data(), D) += dy;
                     }
                     if (a.requires_grad()) {
                       a.node()->ensure_grad();
                       Eigen::ArrayXd dxh = dy * g;
                       const double m1 = dxh.mean();
                       const double m2 = (dxh * xh).mean();
                       Eigen::Map<Eigen::ArrayXd>(a.node()->grad.data() + r * D, D) +=
                           (dxh - m1 - xh * m2) * (*invstd)(r);
                     }
                   }
                 });
}

Tensor sum(const Tensor& a) {
  Eigen::ArrayXd v(1);
  v(0) = a.array().sum();
  return make_op({1}, std::move(v), {a}, [a](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad += n.grad(0); }
  });
}

Tensor mean(const Tensor& a) {
  const double inv = 1.0 / static_cast<double>(a.size());
  Eigen::ArrayXd v(1);
  v(0) = a.array().sum() * inv;
  return make_op({1}, std::move(v), {a}, [a, inv](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad += n.grad(0) * inv; }
  });
}

Tensor select_flat(const Tensor& a, std::int64_t index) {
  if (index < 0 || index >= a.size())
    throw std::out_of_range("select_flat: index " + std::to_string(index) + " out of " +
                            std::to_string(a.size()));
  Eigen::ArrayXd v(1);
  v(0) = a.array()(index);
  return make_op({1}, std::move(v), {a}, [a, index](detail::TensorNode& n) {
    if (a.requires_grad()) { a.node()->ensure_grad(); a.node()->grad(index) += n.grad(0); }
  });
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias, int cin, int cout,
              const Conv2dSpec& spec) {
  if (x.ndim() != 4 || x.dim(3) != cin)
    throw std::invalid_argument("conv2d: input " + shape_str(x.shape()) + " incompatible with cin=" +
                                std::to_string(cin));
  const int kk = spec.kh * spec.kw * cin;
  if (w.ndim() != 2 || w.dim(0) != kk || w.dim(1) != cout)
    throw std::invalid_argument("conv2d: weight " + shape_str(w.shape()) + " expected (" +
                                std::to_string(kk) + "," + std::to_string(cout) + ")");
  const int B = x.dim(0), H = x.dim(1), W = x.dim(2);
  const int OH = (H + 2 * spec.pad - spec.kh) / spec.stride + 1;
  const int OW = (W + 2 * spec.pad - spec.kw) / spec.stride + 1;
  if (OH <= 0 || OW <= 0)
    throw std::invalid_argument("conv2d: empty output for input " + shape_str(x.shape()));
  Shape os{B, OH, OW, cout};
  Eigen::ArrayXd v(shape_size(os));
  MapCM Wm(w.data(), kk, cout);

  const bool track = detail::grad_mode() &&
                     (x.requires_grad() || w.requires_grad() ||
                      (bias.defined() && bias.requires_grad()));
  auto cache = std::make_shared<std::vector<MatRM>>();
  if (track) cache->reserve(B);

  MatRM cols(OH * OW, kk);
  for (int b = 0; b < B; ++b) {
    cols.setZero();
    for (int oy = 0; oy < OH; ++oy)
      for (int ox = 0; ox < OW; ++ox) {
        double* row = cols.data() + (static_cast<std::int64_t>(oy) * OW + ox) * kk;
        for (int ky = 0; ky < spec.kh; ++ky) {
          const int iy = oy * spec.stride - spec.pad + ky;
          if (iy < 0 || iy >= H) continue;
          for (int kx = 0; kx < spec.kw; ++kx) {
            const int ix = ox * spec.stride - spec.pad + kx;
            if (ix < 0 || ix >= W) continue;
            std::memcpy(row + (ky * spec.kw + kx) * cin,
                        x.data() + ((static_cast<std::int64_t>(b) * H + iy) * W + ix) * cin,
                        sizeof(double) * cin);
          }
        }
      }
    MapM out(v.data() + static_cast<std::int64_t>(b) * OH * OW * cout, OH * OW, cout);
    out.noalias() = cols * Wm;
    if (bias.defined())
      out.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(bias.data(), cout);
    if (track) cache->push_back(cols);
  }

  std::vector<Tensor> parents{x, w};
  if (bias.defined()) parents.push_back(bias);
  return make_op(os, std::move(v), parents,
                 [x, w, bias, cache, B, H, W, OH, OW, cin, cout, kk, spec](detail::TensorNode& n) {
                   MapCM Wm(w.data(), kk, cout);
                   for (int b = 0; b < B; ++b) {
                     MapCM dY(n.grad.data() + static_cast<std::int64_t>(b) * OH * OW * cout,
                              OH * OW, cout);
                     if (w.requires_grad()) {
                       w.node()->ensure_grad();
                       MapM(w.node()->grad.data(), kk, cout).noalias() +=
                           (*cache)[b].transpose() * dY;
                     }
                     if (bias.defined() && bias.requires_grad()) {
                       bias.node()->ensure_grad();
                       Eigen::Map<Eigen::RowVectorXd>(bias.node()->grad.data(), cout) +=
                           dY.colwise().sum();
                     }
                     if (x.requires_grad()) {
                       x.node()->ensure_grad();
                       MatRM dCols = dY * Wm.transpose();
                       for (int oy = 0; oy < OH; ++oy)
                         for (int ox = 0; ox < OW; ++ox) {
                           const double* row =
                               dCols.data() + (static_cast<std::int64_t>(oy) * OW + ox) * kk;
                           for (int ky = 0; ky < spec.kh; ++ky) {
                             const int iy = oy * spec.stride - spec.pad + ky;
                             if (iy < 0 || iy >= H) continue;
                             for (int kx = 0; kx < spec.kw; ++kx) {
                               const int ix = ox * spec.stride - spec.pad + kx;
                               if (ix < 0 || ix >= W) continue;
                               double* dst = x.node()->grad.data() +
                                             ((static_cast<std::int64_t>(b) * H + iy) * W + ix) * cin;
                               const double* src = row + (ky * spec.kw + kx) * cin;
                               for (int c = 0; c < cin; ++c) dst[c] += src[c];
                             }
                           }
                         }
                     }
                   }
                 });
}

Tensor avg_pool2d(const Tensor& x, int k) {
  if (x.ndim() != 4 || x.dim(1) % k != 0 || x.dim(2) % k != 0)
    throw std::invalid_argument("avg_pool2d: " + shape_str(x.shape()) + " not divisible by " +
                                std::to_string(k));
  const int B = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
  const int OH = H / k, OW = W / k;
  const double inv = 1.0 / (k * k);
  Shape os{B, OH, OW, C};
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(shape_size(os));
  for (int b = 0; b < B; ++b)
    for (int oy = 0; oy < OH; ++oy)
      for (int ox = 0; ox < OW; ++ox) {
        double* dst = v.data() + ((static_cast<std::int64_t>(b) * OH + oy) * OW + ox) * C;
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            const double* src =
                x.data() + ((static_cast<std::int64_t>(b) * H + oy * k + ky) * W + ox * k + kx) * C;
            for (int c = 0; c < C; ++c) dst[c] += src[c];
          }
        for (int c = 0; c < C; ++c) dst[c] *= inv;
      }
  return make_op(os, std::move(v), {x}, [x, k, B, H, W, C, OH, OW, inv](detail::TensorNode& n) {
    if (!x.requires_grad()) return;
    x.node()->ensure_grad();
    for (int b = 0; b < B; ++b)
      for (int oy = 0; oy < OH; ++oy)
        for (int ox = 0; ox < OW; ++ox) {
          const double* src = n.grad.data() + ((static_cast<std::int64_t>(b) * OH + oy) * OW + ox) * C;
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              double* dst = x.node()->grad.data() +
                            ((static_cast<std::int64_t>(b) * H + oy * k + ky) * W + ox * k + kx) * C;
              for (int c = 0; c < C; ++c) dst[c] += src[c] * inv;
            }
        }
  });
}

Tensor upsample_nearest2x(const Tensor& x) {
  if (x.ndim() != 4)
    throw std::invalid_argument("upsample_nearest2x: need (B,H,W,C), got " + shape_str(x.shape()));
  const int B = x.dim(0), H = x.dim(1), W = x.dim(2), C = x.dim(3);
  Shape os{B, 2 * H, 2 * W, C};
  Eigen::ArrayXd v(shape_size(os));
  for (int b = 0; b < B; ++b)
    for (int y = 0; y < 2 * H; ++y)
      for (int xw = 0; xw < 2 * W; ++xw)
        std::memcpy(v.data() + ((static_cast<std::int64_t>(b) * 2 * H + y) * 2 * W + xw) * C,
                    x.data() + ((static_cast<std::int64_t>(b) * H + y / 2) * W + xw / 2) * C,
                    sizeof(double) * C);
  return make_op(os, std::move(v), {x}, [x, B, H, W, C](detail::TensorNode& n) {
    if (!x.requires_grad()) return;
    x.node()->ensure_grad();
    for (int b = 0; b < B; ++b)
      for (int y = 0; y < 2 * H; ++y)
        for (int xw = 0; xw < 2 * W; ++xw) {
          const double* src = n.grad.data() + ((static_cast<std::int64_t>(b) * 2 * H + y) * 2 * W + xw) * C;
          double* dst =
              x.node()->grad.data() + ((static_cast<std::int64_t>(b) * H + y / 2) * W + xw / 2) * C;
          for (int c = 0; c < C; ++c) dst[c] += src[c];
        }
  });
}

Tensor mse(const Tensor& a, const Tensor& b) {
  Tensor d = sub(a, b);
  return mean(mul(d, d));
}

Tensor sse(const Tensor& a, const Tensor& b) {
  Tensor d = sub(a, b);
  return sum(mul(d, d));
}

}  // namespace scenegen
