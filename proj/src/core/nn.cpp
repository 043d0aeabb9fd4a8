// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#include "scenegen/core/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace scenegen {

Tensor ParamMap::add(const std::string& name, Tensor t) {
  for (const auto& [n, _] : items_)
    if (n == name) throw std::logic_error("ParamMap: duplicate parameter " + name);
  items_.emplace_back(name, t);
  return t;
}

void ParamMap::merge(const std::string& prefix, const ParamMap& other) {
  for (const auto& [n, t] : other.items_) add(prefix + n, t);
}

std::vector<Tensor> ParamMap::tensors() const {
  std::vector<Tensor> out;
  out.reserve(items_.size());
  for (const auto& [_, t] : items_) out.push_back(t);
  return out;
}

Tensor ParamMap::find(const std::string& name) const {
  for (const auto& [n, t] : items_)
    if (n == name) return t;
  return Tensor();
}

void ParamMap::set_requires_grad(bool b) {
  for (auto& [_, t] : items_) t.set_requires_grad(b);
}

std::int64_t ParamMap::total_size() const {
  std::int64_t n = 0;
  for (const auto& [_, t] : items_) n += t.size();
  return n;
}

void init_trunc_normal(Tensor& t, RandomStream& rng, double stddev) {
  for (std::int64_t i = 0; i < t.size(); ++i) {
    double v;
    do {
      v = rng.normal();
    } while (std::abs(v) > 2.0);
    t.data()[i] = v * stddev;
  }
}

void init_normal(Tensor& t, RandomStream& rng, double stddev) {
  for (std::int64_t i = 0; i < t.size(); ++i) t.data()[i] = rng.normal() * stddev;
}

Tensor randn(const Shape& s, RandomStream& rng) {
  Tensor t = Tensor::zeros(s);
  for (std::int64_t i = 0; i < t.size(); ++i) t.data()[i] = rng.normal();
  return t;
}

Linear::Linear(int in, int out, ParamMap& params, const std::string& name, RandomStream& rng,
               double init_std, bool zero_init) {
  weight = Tensor::param({in, out});
  bias = Tensor::param({out});
  if (!zero_init) init_trunc_normal(weight, rng, init_std);
  params.add(name + ".weight", weight);
  params.add(name + ".bias", bias);
}

Tensor Linear::forward(const Tensor& x) const {
  Tensor y = matmul(x, weight);
  return add(y, broadcast(bias, y.shape()));
}

LayerNorm::LayerNorm(int dim, ParamMap& params, const std::string& name) {
  gamma = Tensor::constant({dim}, 1.0);
  gamma.set_requires_grad(true);
  beta = Tensor::param({dim});
  params.add(name + ".gamma", gamma);
  params.add(name + ".beta", beta);
}

MultiheadSelfAttention::MultiheadSelfAttention(int dim_, int heads_, ParamMap& params,
                                               const std::string& name, RandomStream& rng)
    : heads(heads_), dim(dim_) {
  if (dim % heads != 0)
    throw std::invalid_argument("attention: heads " + std::to_string(heads) +
                                " must divide dim " + std::to_string(dim));
  wq = Linear(dim, dim, params, name + ".wq", rng);
  wk = Linear(dim, dim, params, name + ".wk", rng);
  wv = Linear(dim, dim, params, name + ".wv", rng);
  wo = Linear(dim, dim, params, name + ".wo", rng);
}

Tensor MultiheadSelfAttention::forward(const Tensor& x) const {
  if (x.ndim() != 3 || x.dim(2) != dim)
    throw std::invalid_argument("attention: expected (B,T," + std::to_string(dim) + "), got " +
                                shape_str(x.shape()));
  const int B = x.dim(0), T = x.dim(1);
  const int dh = dim / heads;
  auto split_heads = [&](const Tensor& t) {
    Tensor r = reshape(t, {B, T, heads, dh});
    r = permute(r, {0, 2, 1, 3});
    return reshape(r, {B * heads, T, dh});
  };
  Tensor q = split_heads(wq.forward(x));
  Tensor k = split_heads(wk.forward(x));
  Tensor v = split_heads(wv.forward(x));
  Tensor scores = scale(bmm(q, k, /*transpose_b=*/true), 1.0 / std::sqrt(double(dh)));
  Tensor probs = softmax_last(scores);
  Tensor ctx = bmm(probs, v);
  ctx = reshape(ctx, {B, heads, T, dh});
  ctx = permute(ctx, {0, 2, 1, 3});
  ctx = reshape(ctx, {B, T, dim});
  return wo.forward(ctx);
}

TransformerBlock::TransformerBlock(int dim, int heads, int mlp, ParamMap& params,
                                   const std::string& name, RandomStream& rng) {
  ln1 = LayerNorm(dim, params, name + ".ln1");
  ln2 = LayerNorm(dim, params, name + ".ln2");
  attn = MultiheadSelfAttention(dim, heads, params, name + ".attn", rng);
  fc1 = Linear(dim, mlp, params, name + ".fc1", rng);
  fc2 = Linear(mlp, dim, params, name + ".fc2", rng);
}

Tensor TransformerBlock::forward(const Tensor& x) const {
  Tensor h = add(x, attn.forward(ln1.forward(x)));
  Tensor m = fc2.forward(gelu(fc1.forward(ln2.forward(h))));
  return add(h, m);
}

AdamW::AdamW(std::vector<Tensor> params, Options opt) : params_(std::move(params)), opt_(opt) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& p : params_) {
    m_.push_back(Eigen::ArrayXd::Zero(p.size()));
    v_.push_back(Eigen::ArrayXd::Zero(p.size()));
  }
}

void AdamW::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void AdamW::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = params_[i];
    const Eigen::ArrayXd& g = p.grad();
    m_[i] = opt_.beta1 * m_[i] + (1.0 - opt_.beta1) * g;
    v_[i] = opt_.beta2 * v_[i] + (1.0 - opt_.beta2) * g * g;
    Eigen::ArrayXd mhat = m_[i] / bc1;
    Eigen::ArrayXd vhat = v_[i] / bc2;
    p.array() -= opt_.lr * (mhat / (vhat.sqrt() + opt_.eps) + opt_.weight_decay * p.array());
  }
}

}  // namespace scenegen
