// Copyright (c) 2026 scenegen contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scenegen/core/ops.hpp"
#include "scenegen/core/random.hpp"

namespace scenegen {

// Ordered, named parameter collection; the unit of checkpointing and of
// optimizer/freeze bookkeeping.
class ParamMap {
 public:
  Tensor add(const std::string& name, Tensor t);
  void merge(const std::string& prefix, const ParamMap& other);
  const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
  std::vector<Tensor> tensors() const;
  Tensor find(const std::string& name) const;  // undefined Tensor if missing
  void set_requires_grad(bool b);
  std::int64_t total_size() const;

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
};

void init_trunc_normal(Tensor& t, RandomStream& rng, double stddev);
void init_normal(Tensor& t, RandomStream& rng, double stddev);
Tensor randn(const Shape& s, RandomStream& rng);

// y = x @ W + b for x (..., in).
struct Linear {
  Tensor weight;  // (in, out)
  Tensor bias;    // (out)
  Linear() = default;
  Linear(int in, int out, ParamMap& params, const std::string& name, RandomStream& rng,
         double init_std = 0.02, bool zero_init = false);
  Tensor forward(const Tensor& x) const;
};

struct LayerNorm {
  Tensor gamma, beta;
  LayerNorm() = default;
  LayerNorm(int dim, ParamMap& params, const std::string& name);
  Tensor forward(const Tensor& x) const { return layer_norm_last(x, gamma, beta); }
};

// Standard multi-head self-attention over (B, T, D) token batches.
struct MultiheadSelfAttention {
  Linear wq, wk, wv, wo;
  int heads = 1, dim = 0;
  MultiheadSelfAttention() = default;
  MultiheadSelfAttention(int dim, int heads, ParamMap& params, const std::string& name,
                         RandomStream& rng);
  Tensor forward(const Tensor& x) const;
};

// Pre-norm block: x += attn(ln1(x)); x += mlp(ln2(x)).
struct TransformerBlock {
  LayerNorm ln1, ln2;
  MultiheadSelfAttention attn;
  Linear fc1, fc2;
  TransformerBlock() = default;
  TransformerBlock(int dim, int heads, int mlp, ParamMap& params, const std::string& name,
                   RandomStream& rng);
  Tensor forward(const Tensor& x) const;
};

// Decoupled weight decay Adam over a fixed parameter list.
class AdamW {
 public:
  struct Options {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
  };
  AdamW() = default;
  AdamW(std::vector<Tensor> params, Options opt);
  void zero_grad();
  void step();
  void set_lr(double lr) { opt_.lr = lr; }
  double lr() const { return opt_.lr; }

 private:
  std::vector<Tensor> params_;
  std::vector<Eigen::ArrayXd> m_, v_;
  Options opt_;
  std::int64_t t_ = 0;
};

}  // namespace scenegen
